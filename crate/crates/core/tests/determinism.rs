use rpkm::dataio::{generate_mixture, MixtureSpec};
use rpkm::harness::{default_init, run_experiment_sweep, run_property_suite, SuiteOptions, SuiteScale};
use rpkm::kmeans::{lloyd, Init, SolverSpec};
use rpkm::mailman::{build_plan, project_mailman};
use rpkm::matrix::{matmul, Matrix};
use rpkm::projection::Method;
use rpkm::rng::Domain;

fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(f)
}

#[test]
fn kernels_are_bitwise_stable_across_thread_counts() {
    let a = Matrix::gaussian(300, 256, 4, Domain::Instance);
    let b = Matrix::gaussian(256, 200, 5, Domain::Instance);
    let plan = build_plan(256, 100, 6).unwrap();
    let run = || (project_mailman(&a, &plan).unwrap(), matmul(&a, &b).unwrap());
    let one = in_pool(1, run);
    let many = in_pool(6, run);
    assert_eq!(one, many);
}

#[test]
fn lloyd_and_sweeps_repeat_exactly() {
    let ds =
        generate_mixture(&MixtureSpec { n: 120, d: 128, k: 6, center_scale: 1.0, noise_sigma: 1.0, seed: 8 }).unwrap();
    let spec = SolverSpec::lloyd(Init::RandomRows).with_replicates(4);
    let first = in_pool(1, || lloyd(&ds.points, 6, &spec, 3).unwrap());
    let second = in_pool(5, || lloyd(&ds.points, 6, &spec, 3).unwrap());
    assert_eq!(first.assignment, second.assignment);
    assert_eq!(first.objective_trace, second.objective_trace);

    let spec = SolverSpec::lloyd(default_init(&ds, 6));
    let sweep =
        |threads| in_pool(threads, || run_experiment_sweep(&ds, 6, &[10, 40], &Method::ALL, &spec, 2, 0.25).unwrap());
    let (x, y) = (sweep(1), sweep(4));
    for (p, q) in x.iter().zip(&y) {
        assert_eq!((&p.method, p.t, p.f_tilde, p.accuracy), (&q.method, q.t, q.f_tilde, q.accuracy));
    }
}

#[test]
fn hd_baseline_is_reproducible() {
    let ds =
        generate_mixture(&MixtureSpec { n: 80, d: 64, k: 4, center_scale: 0.8, noise_sigma: 1.0, seed: 1 }).unwrap();
    let spec = SolverSpec::lloyd(default_init(&ds, 4));
    let a = run_experiment_sweep(&ds, 4, &[5], &[Method::None], &spec, 9, 0.25).unwrap();
    let b = run_experiment_sweep(&ds, 4, &[5], &[Method::None], &spec, 9, 0.25).unwrap();
    assert_eq!((a[0].f_tilde, a[0].accuracy), (b[0].f_tilde, b[0].accuracy));
}

#[test]
fn property_suite_is_independent_of_thread_count() {
    let opts = SuiteOptions::new(12, SuiteScale::Quick);
    let one = in_pool(1, || run_property_suite(&opts).unwrap());
    let many = in_pool(4, || run_property_suite(&opts).unwrap());
    assert_eq!(one.reports, many.reports);
}

#[test]
fn projected_clustering_tracks_hd_once_t_reaches_100() {
    let ds = generate_mixture(&MixtureSpec { n: 400, d: 1024, k: 40, center_scale: 1.0, noise_sigma: 1.0, seed: 2 })
        .unwrap();
    let spec = SolverSpec::lloyd(default_init(&ds, 40));
    let recs =
        run_experiment_sweep(&ds, 40, &[100, 150, 200], &[Method::SignMailman, Method::None], &spec, 5, 0.25).unwrap();
    let hd = recs.last().unwrap().f_tilde;
    for r in &recs[..3] {
        assert!(r.f_tilde <= 1.1 * hd, "t = {}: {} vs hd {hd}", r.t, r.f_tilde);
    }
}
