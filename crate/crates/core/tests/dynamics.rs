//! Numerical consistency of propagators, integrators and Picard iteration.

use std::sync::Arc;

use chemospec::dynamics::{integrate, picard_mild_solution, PicardOptions, Scheme, SimConfig};
use chemospec::regions::{decay_constant_c_star, spectral_bound_m};
use chemospec::spectral::{
    lp_norm, make_grid, propagate_bounded_part, propagate_heat, propagate_linear, Field, GridSpec,
    LinearPropagator, SpectralGrid,
};
use chemospec::ChemoParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn reference() -> ChemoParams {
    ChemoParams::new(4.0, 1.0, 9.0, 1.0).unwrap()
}

fn bump(grid: &Arc<SpectralGrid>, mass: f64, width: f64) -> Field {
    let f = Field::from_fn(grid.clone(), |x, y| (-(x * x + y * y) / (2.0 * width * width)).exp()).unwrap();
    let m = lp_norm(&f, 1.0);
    f.scaled(mass / m)
}

/// Smooth random field: a few random Fourier modes times a Gaussian envelope.
fn random_field(grid: &Arc<SpectralGrid>, rng: &mut ChaCha8Rng, amplitude: f64) -> Field {
    let l = grid.length();
    let modes: Vec<(f64, f64, f64)> = (0..6)
        .map(|_| (rng.random_range(1..6) as f64, rng.random_range(0.0..6.3), rng.random_range(-1.0..1.0)))
        .collect();
    Field::from_fn(grid.clone(), |x, y| {
        let s: f64 = modes
            .iter()
            .map(|(k, ph, c)| c * (2.0 * std::f64::consts::PI * k * (x + 0.5 * y) / l + ph).cos())
            .sum();
        amplitude * s * (-(x * x + y * y) / 8.0).exp()
    })
    .unwrap()
}

fn sup_diff(a: &Field, b: &Field) -> f64 {
    a.sub(b).max_abs()
}

#[test]
fn semigroup_property() {
    let p = reference();
    for dim in [1, 2] {
        let g = make_grid(dim, if dim == 1 { 256 } else { 32 }, 30.0).unwrap();
        let v = bump(&g, 1.0, 1.0);
        for a in [2.0, 8.0, 12.0] {
            let prop = LinearPropagator::new(&p, a, g.clone()).unwrap();
            let (s, t) = (0.3, 0.45);
            let two = prop.apply(&prop.apply(&v, s).unwrap(), t).unwrap();
            let one = prop.apply(&v, s + t).unwrap();
            assert!(sup_diff(&one, &two) <= 1e-12 * (1.0 + one.max_abs()), "dim {dim} A {a}");
            assert_eq!(prop.apply(&v, 0.0).unwrap(), v);
            let free = propagate_linear(&p, a, &v, s + t).unwrap();
            assert!(sup_diff(&one, &free) <= 1e-14 * (1.0 + one.max_abs()));
        }
    }
}

#[test]
fn bounded_part_growth_bound() {
    let p = reference();
    let g = make_grid(1, 512, 40.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..10 {
        let v = random_field(&g, &mut rng, 1.0);
        let a = rng.random_range(0.1..10.0);
        let t = rng.random_range(0.0..1.0);
        let w = propagate_bounded_part(&p, a, &v, t).unwrap();
        // |ξ|² + h_A ≤ A·β1 mode by mode, so L² grows at most by e^{Aβ1 t}.
        let bound = (a * p.beta1() * t).exp() * lp_norm(&v, 2.0);
        assert!(lp_norm(&w, 2.0) <= bound * (1.0 + 1e-12));
    }
}

#[test]
fn heat_domination_below_threshold() {
    let p = reference();
    let g = make_grid(1, 512, 40.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let v = random_field(&g, &mut rng, 1.0);
        let a = rng.random_range(0.1..8.0);
        let c = decay_constant_c_star(&p, a).unwrap();
        let t = rng.random_range(0.1..5.0);
        let lin = lp_norm(&propagate_linear(&p, a, &v, t).unwrap(), 2.0);
        let heat = lp_norm(&propagate_heat(&v, t, c).unwrap(), 2.0);
        assert!(lin <= heat * (1.0 + 1e-12), "A={a} t={t}: {lin} > {heat}");
    }
}

fn run(p: ChemoParams, a: f64, grid: GridSpec, t_end: f64, dt: f64, scheme: Scheme, v0: &Field) -> Field {
    let mut cfg = SimConfig::new(p, a, grid, t_end, dt);
    cfg.scheme = scheme;
    cfg.stride = usize::MAX;
    integrate(&cfg, v0).unwrap().1
}

#[test]
fn schemes_are_fourth_order() {
    // Halving dt against a dt/8 reference must cut the L² error by ≥ 2³·0.8.
    let p = reference();
    let spec = GridSpec::new(1, 128, 20.0);
    let g = spec.build().unwrap();
    let v0 = bump(&g, 2.0, 1.0);
    let dt = 0.02;
    for scheme in [Scheme::IfRk4, Scheme::Etdrk4] {
        let reference = run(p, 4.0, spec, 1.0, dt / 8.0, scheme, &v0);
        let e1 = lp_norm(&run(p, 4.0, spec, 1.0, dt, scheme, &v0).sub(&reference), 2.0);
        let e2 = lp_norm(&run(p, 4.0, spec, 1.0, dt / 2.0, scheme, &v0).sub(&reference), 2.0);
        assert!(e1 / e2 >= 6.4, "{scheme:?}: {e1:e} / {e2:e} = {}", e1 / e2);
    }
}

#[test]
fn zero_solution_is_exact() {
    for (dim, n) in [(1, 128), (2, 32)] {
        let spec = GridSpec::new(dim, n, 20.0);
        let zero = Field::zeros(spec.build().unwrap());
        for scheme in [Scheme::IfRk4, Scheme::Etdrk4] {
            let mut cfg = SimConfig::new(reference(), 16.0, spec, 1.0, 0.005);
            cfg.scheme = scheme;
            let (series, last) = integrate(&cfg, &zero).unwrap();
            assert!(last.values().iter().all(|&v| v == 0.0));
            assert!(series.norms.iter().flatten().all(|&v| v == 0.0));
        }
    }
}

#[test]
fn mass_is_conserved() {
    let spec = GridSpec::new(2, 32, 20.0);
    let g = spec.build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let v0 = random_field(&g, &mut rng, 0.5);
    let mut cfg = SimConfig::new(reference(), 4.0, spec, 2.0, 0.01);
    cfg.stride = 5;
    let (series, _) = integrate(&cfg, &v0).unwrap();
    let tol = 1e-12 * (1.0 + v0.max_abs());
    for m in &series.mean_trace {
        assert!((m - v0.mean()).abs() <= tol, "{m} vs {}", v0.mean());
    }
}

#[test]
fn integrator_matches_picard_oracle() {
    let p = reference();
    let spec = GridSpec::new(1, 128, 30.0);
    let g = spec.build().unwrap();
    let v0 = bump(&g, 1e-2, 1.0);
    let t = 0.1;
    let nl = run(p, 4.0, spec, t, 1e-3, Scheme::IfRk4, &v0);
    let mild = picard_mild_solution(&p, 4.0, &v0, t, PicardOptions::default()).unwrap();
    assert!(lp_norm(&nl.sub(&mild.field), 2.0) <= 1e-6);
}

#[test]
fn small_data_global_bound() {
    // Stable regime, n = 1, p = 1, q = ∞; the constant 10 is a harness budget.
    let p = reference();
    let spec = GridSpec::new(1, 2048, 400.0);
    let g = spec.build().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for run_ix in 0..10 {
        let raw = random_field(&g, &mut rng, 1.0);
        let v0 = raw.scaled(rng.random_range(1e-4..1e-2) / lp_norm(&raw, 1.0));
        let a = rng.random_range(0.5..8.0);
        let mut cfg = SimConfig::new(p, a, spec, 100.0, 0.05);
        cfg.norms = vec![1.0, f64::INFINITY];
        cfg.stride = 20;
        let (series, _) = integrate(&cfg, &v0).unwrap();
        let m0 = lp_norm(&v0, 1.0);
        assert!(series.blow_up_time.is_none());
        let l1 = series.norm(1.0).unwrap();
        let li = series.norm(f64::INFINITY).unwrap();
        for (i, &t) in series.times.iter().enumerate() {
            assert!(l1[i] / m0 <= 10.0, "run {run_ix}: L1 ratio {} at t={t}", l1[i] / m0);
            assert!(t.sqrt() * li[i] / m0 <= 10.0, "run {run_ix}: decay ratio at t={t}");
        }
    }
}

#[test]
fn small_data_follows_linear_flow() {
    let p = reference();
    let spec = GridSpec::new(1, 256, 40.0);
    let g = spec.build().unwrap();
    let v0 = bump(&g, 1e-6, 1.0);
    for a in [4.0, 12.0] {
        let t = 1.0;
        let dt = 0.1 / spectral_bound_m(&p, a).unwrap().big_m.max(1.0);
        let nl = run(p, a, spec, t, dt, Scheme::IfRk4, &v0);
        let lin = propagate_linear(&p, a, &v0, t).unwrap();
        assert!(sup_diff(&nl, &lin) <= 1e-3 * lin.max_abs(), "A={a}");
    }
}

#[test]
fn picard_increments_contract() {
    let p = reference();
    let g = make_grid(1, 128, 30.0).unwrap();
    let v0 = bump(&g, 0.5, 1.0);
    let opts = PicardOptions { iterations: 8, nodes: 24, ..Default::default() };
    let sol = picard_mild_solution(&p, 4.0, &v0, 0.5, opts).unwrap();
    assert_eq!(sol.increments.len(), 8);
    for w in sol.increments.windows(2) {
        assert!(w[1] <= 0.5 * w[0] || w[1] < 1e-14, "{:?}", sol.increments);
    }
    let seq = picard_mild_solution(
        &p,
        4.0,
        &v0,
        0.5,
        PicardOptions { exec: chemospec::dynamics::ExecChoice::Sequential, ..opts },
    )
    .unwrap();
    assert_eq!(seq, sol);
}

#[test]
fn exec_modes_agree() {
    use chemospec::kernels::BesselKernel;
    use chemospec::Exec;
    let g = make_grid(2, 32, 10.0).unwrap();
    let k = BesselKernel::new(1.0, 2).unwrap();
    let a = k.sample_on_grid(&g, 1e-12, Exec::Sequential).unwrap();
    let b = k.sample_on_grid(&g, 1e-12, Exec::Parallel).unwrap();
    assert_eq!(a, b);
}
