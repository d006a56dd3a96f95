use rpkm::evaluation::pseudo_inverse_deviation;
use rpkm::matrix::{best_rank_k, matmul, pseudo_inverse, spectral_norm_default, svd_thin, Matrix};
use rpkm::projection::{sample_sign_matrix, ProjectionMatrix};
use rpkm::rng::Domain;

/// Eigenvalues of a symmetric matrix by cyclic two-sided Jacobi rotations,
/// sorted descending. Independent of the one-sided SVD under test.
fn symmetric_eigenvalues(m: &Matrix) -> Vec<f64> {
    let n = m.n_rows();
    let mut a: Vec<Vec<f64>> = (0..n).map(|i| m.row(i).to_vec()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for row in a.iter_mut() {
                    let (akp, akq) = (row[p], row[q]);
                    row[p] = c * akp - s * akq;
                    row[q] = s * akp + c * akq;
                }
                let (head, tail) = a.split_at_mut(q);
                for (apk, aqk) in head[p].iter_mut().zip(tail[0].iter_mut()) {
                    let (x, y) = (*apk, *aqk);
                    *apk = c * x - s * y;
                    *aqk = s * x + c * y;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    ev.sort_by(|x, y| y.total_cmp(x));
    ev
}

fn gram(a: &Matrix) -> Matrix {
    matmul(&a.transpose(), a).unwrap()
}

fn assert_orthonormal_columns(q: &Matrix) {
    let g = gram(q);
    let err = g.sub(&Matrix::identity(q.n_cols())).unwrap().max_abs();
    assert!(err < 1e-10, "columns not orthonormal: {err:e}");
}

#[test]
fn singular_values_match_gram_eigenvalues() {
    for (seed, (n, d)) in [(6, 4), (4, 9), (12, 12), (30, 7)].into_iter().enumerate() {
        let a = Matrix::gaussian(n, d, seed as u64, Domain::Instance);
        let r = n.min(d);
        let svd = svd_thin(&a, r).unwrap();
        let small = if n >= d { gram(&a) } else { gram(&a.transpose()) };
        let ev = symmetric_eigenvalues(&small);
        for (i, &e) in ev.iter().take(r).enumerate() {
            let expected = e.max(0.0).sqrt();
            assert!((svd.sigma[i] - expected).abs() < 1e-9 * (1.0 + expected), "{n}x{d}: σ{i}");
        }
        assert_orthonormal_columns(&svd.u);
        assert_orthonormal_columns(&svd.v);
        let err = a.sub(&svd.reconstruct()).unwrap().frobenius_norm();
        assert!(err < 1e-10 * a.frobenius_norm());
    }
}

#[test]
fn rank_deficient_svd_completes_u() {
    let b = Matrix::gaussian(8, 2, 1, Domain::Instance);
    let c = Matrix::gaussian(2, 5, 2, Domain::Instance);
    let a = matmul(&b, &c).unwrap();
    let svd = svd_thin(&a, 5).unwrap();
    assert_eq!(svd.rank_estimate, 2);
    assert!(svd.sigma[2..].iter().all(|&s| s < 1e-10));
    assert_orthonormal_columns(&svd.u);
}

#[test]
fn spectral_norm_agrees_with_svd() {
    for seed in 0..5 {
        let a = Matrix::gaussian(20, 15, seed, Domain::Instance);
        let top = svd_thin(&a, 1).unwrap().sigma[0];
        let power = spectral_norm_default(&a).unwrap();
        assert!((power - top).abs() < 1e-6 * top, "{power} vs {top}");
    }
}

#[test]
fn best_rank_k_residual_is_tail_energy() {
    let a = Matrix::gaussian(15, 11, 9, Domain::Instance);
    let sigma = svd_thin(&a, 11).unwrap().sigma;
    for k in 1..11 {
        let residual = a.sub(&best_rank_k(&a, k).unwrap()).unwrap().frobenius_norm_sq();
        let tail: f64 = sigma[k..].iter().map(|s| s * s).sum();
        assert!((residual - tail).abs() < 1e-9 * a.frobenius_norm_sq(), "k = {k}");
    }
}

#[test]
fn pseudo_inverse_satisfies_penrose_conditions() {
    for (n, d) in [(7, 4), (4, 7), (5, 5)] {
        let a = Matrix::gaussian(n, d, (n * d) as u64, Domain::Instance);
        let p = pseudo_inverse(&a);
        let apa = matmul(&matmul(&a, &p).unwrap(), &a).unwrap();
        let pap = matmul(&matmul(&p, &a).unwrap(), &p).unwrap();
        assert!(apa.sub(&a).unwrap().max_abs() < 1e-10);
        assert!(pap.sub(&p).unwrap().max_abs() < 1e-10);
        let ap = matmul(&a, &p).unwrap();
        assert!(ap.sub(&ap.transpose()).unwrap().max_abs() < 1e-10);
    }
}

#[test]
fn pseudo_inverse_deviation_matches_singular_value_identity() {
    // With Φ = VᵀR, ‖Φ⁺ − Φᵀ‖₂ = max |1/σ − σ| over the singular values of Φ.
    let a = Matrix::gaussian(30, 64, 3, Domain::Instance);
    let v = svd_thin(&a, 3).unwrap().v;
    for seed in 0..4 {
        let r = sample_sign_matrix(64, 200, seed).unwrap().dense();
        let phi = matmul(&v.transpose(), &r).unwrap();
        let sigma = svd_thin(&phi, 3).unwrap().sigma;
        let expected = sigma.iter().map(|s| (1.0 / s - s).abs()).fold(0.0, f64::max);
        let got = pseudo_inverse_deviation(&v, &r).unwrap();
        assert!((got - expected).abs() < 1e-10, "{got} vs {expected}");
    }
}
