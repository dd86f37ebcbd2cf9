//! Acceptance run over the Rb87 cigar family. Prints one PASS/FAIL line
//! per criterion and exits nonzero if any fails.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;

use becpert::analysis::{critical_atom_number, match_stiffness, schmidt_projections};
use becpert::grids::{inner_product, AxialGrid, Field1D, GridSpec, RadialGrid};
use becpert::pipeline::{solve_point, PointSolution};
use becpert::schmidt::{laguerre_gaussian_series, longitudinal_moments, phi10};
use becpert::solvers::{solve_gp1d, solve_gp3d, SolveSettings};
use becpert::special::polylog2;
use becpert::transverse::{reduced_eta_t, upsilon_t_spectral};
use becpert::units::{AtomSpecies, Condensate};

const NU_T: f64 = 350.0;
const ATOMS: [f64; 5] = [1000.0, 2000.0, 3000.0, 4000.0, 5000.0];
const POWERS: [u32; 3] = [2, 4, 10];
const REFERENCE: &str = include_str!(concat!(
    env!("CARGO_MANIFEST_DIR"),
    "/../../data/table1_reference.csv"
));

struct Harness {
    failed: Vec<String>,
    total: usize,
}

impl Harness {
    fn check(&mut self, id: &str, name: &str, ok: bool, detail: String) {
        self.total += 1;
        println!(
            "{} [{id}] {name}: {detail}",
            if ok { "PASS" } else { "FAIL" }
        );
        if !ok {
            self.failed.push(format!("[{id}] {name}"));
        }
    }
}

fn reference() -> BTreeMap<(u32, u64), f64> {
    REFERENCE
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with('q'))
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (
                (f[0].parse().unwrap(), f[1].parse().unwrap()),
                f[2].parse().unwrap(),
            )
        })
        .collect()
}

fn non_increasing(h: &[f64]) -> bool {
    h.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs())
}

fn rel(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

fn main() {
    let start = Instant::now();
    let mut h = Harness {
        failed: Vec::new(),
        total: 0,
    };
    let rb = AtomSpecies::rb87();
    let settings = SolveSettings::default();

    // 1. closed-form constants
    let eta2 = reduced_eta_t(2);
    let exact2 = eta2 * eta2 * (4.0f64 / 3.0).ln() / 2.0;
    let e2 = rel(upsilon_t_spectral(2), exact2);
    let eta1 = reduced_eta_t(1);
    let exact1 = eta1 * eta1 * (8.0 - 4.0 * 3f64.sqrt()).ln();
    let e1 = rel(upsilon_t_spectral(1), exact1);
    let s = laguerre_gaussian_series(&RadialGrid::new(12.0, 1024).unwrap());
    let li2 = polylog2(0.25).unwrap();
    let el = rel(inner_product(&s, &s).unwrap(), li2);
    h.check(
        "1",
        "closed-form constants",
        e2 < 1e-10 && e1 < 1e-10 && el < 1e-8,
        format!(
            "Upsilon_T rel err D=2 {e2:.1e}, D=1 {e1:.1e}; Li2(1/4) quadrature rel err {el:.1e}"
        ),
    );

    // 4. critical atom number and matched traps
    let base = Condensate::cigar(&rb, NU_T, 1000.0, 2, 10.0).unwrap();
    let nt = critical_atom_number(&base, 1025, &settings).unwrap();
    let matches: Vec<_> = POWERS
        .iter()
        .map(|&q| match_stiffness(&base, q, nt.atoms, 1025, &settings).unwrap())
        .collect();
    let expected_ratio = [10.0, 24.0, 57.0];
    let ratios_ok = matches
        .iter()
        .zip(expected_ratio)
        .all(|(m, r)| rel(m.aspect_ratio, r) <= 0.05);
    h.check(
        "4",
        "critical atom number and matched aspect ratios",
        rel(nt.atoms, 14000.0) <= 0.10 && ratios_ok,
        format!(
            "N_T = {:.1}; aspect 1:{:.2}, 1:{:.2}, 1:{:.2}",
            nt.atoms, matches[0].aspect_ratio, matches[1].aspect_ratio, matches[2].aspect_ratio
        ),
    );

    // all fifteen points
    let tasks: Vec<(u32, f64, f64)> = matches
        .iter()
        .flat_map(|m| ATOMS.iter().map(move |&n| (m.q, n, m.z0)))
        .collect();
    let solved: Vec<PointSolution> = tasks
        .par_iter()
        .map(|&(q, n, z0)| {
            let cond = Condensate::cigar(&rb, NU_T, n, q, z0).unwrap();
            solve_point(&cond, &GridSpec::default(), &settings).unwrap()
        })
        .collect();
    let point = |q: u32, n: f64| {
        solved
            .iter()
            .find(|p| p.report.q == q && p.report.atoms == n)
            .unwrap()
    };

    // 2. P_D table against the reference values
    let table = reference();
    println!("       q      N    P_D x1e4   reference");
    let mut cells_ok = true;
    for p in &solved {
        let r = &p.report;
        let expected = table[&(r.q, r.atoms as u64)];
        let ours = r.p_d * 1e4;
        let ok = (ours - expected).abs() <= (0.5 * expected).max(0.05);
        cells_ok &= ok;
        println!(
            "    {:>4} {:>6} {:>11.4} {:>11.2}{}",
            r.q,
            r.atoms,
            ours,
            expected,
            if ok { "" } else { "  out of tolerance" }
        );
    }
    let in_n = POWERS.iter().all(|&q| {
        ATOMS
            .windows(2)
            .all(|w| point(q, w[1]).report.p_d > point(q, w[0]).report.p_d)
    });
    let in_q = ATOMS.iter().all(|&n| {
        POWERS
            .windows(2)
            .all(|w| point(w[1], n).report.p_d < point(w[0], n).report.p_d)
    });
    h.check(
        "2",
        "probability deficit table",
        cells_ok && in_n && in_q,
        format!("15 cells within max(50%, 0.05): {cells_ok}; increasing in N: {in_n}; decreasing in q: {in_q}"),
    );

    // 3. chemical potential ordering
    let mut ordering_ok = true;
    for p in solved.iter().filter(|p| p.report.atoms <= 2000.0) {
        let r = &p.report;
        ordering_ok &= (r.mu_tilde - r.mu_3d).abs() <= (r.mu_1d - r.mu_3d).abs();
    }
    let r = &point(2, 1000.0).report;
    let gap = (r.mu_3d - r.mu_tilde).abs();
    h.check(
        "3",
        "chemical potential ordering",
        ordering_ok && r.mu2.abs() > 5.0 * gap,
        format!(
            "quintic closer than quasi-1D for N <= 2000: {ordering_ok}; q=2 N=1000 |mu2| = {:.3e}, |mu_3d - mu~| = {gap:.3e}",
            r.mu2.abs()
        ),
    );

    // 5. concurrence
    let mut identity = 0.0f64;
    let mut c_max = 0.0f64;
    for p in &solved {
        let r = &p.report;
        let c = &p.condensate;
        let formula = 2.0 * li2.sqrt() * (c.atoms - 1.0) * c.scattering_length * r.delta_eta_l;
        identity = identity.max(rel(r.c_pert, formula));
        c_max = c_max.max(r.c_exact);
    }
    let c_in_q = ATOMS.iter().all(|&n| {
        POWERS
            .windows(2)
            .all(|w| point(w[1], n).report.c_exact < point(w[0], n).report.c_exact)
    });
    h.check(
        "5",
        "concurrence",
        identity < 1e-14 && c_max < 0.1 && c_in_q,
        format!("formula identity rel err {identity:.1e}; max C~ = {c_max:.4}; decreasing in q: {c_in_q}"),
    );

    // 6. property suites
    let mut variance = 0.0f64;
    let mut ortho = 0.0f64;
    let mut cube = 0.0f64;
    let mut monotone = true;
    let mut dual = 0.0f64;
    for p in &solved {
        let phi = &p.model.phi00;
        let m = &p.model.moments;
        // spread computed directly as ∫φ²(φ² - eta)²
        let w = phi.grid.weights();
        let spread: f64 = w
            .iter()
            .zip(&phi.values)
            .map(|(w, x)| w * x * x * (x * x - m.eta_l).powi(2))
            .sum();
        let six: f64 = w.iter().zip(&phi.values).map(|(w, x)| w * x.powi(6)).sum();
        variance = variance.max(rel(m.eta_l * m.eta_l + spread, six));
        variance = variance.max(rel(spread.sqrt(), m.delta_eta_l));
        let f = &p.model.phi10;
        ortho = ortho
            .max((inner_product(f, f).unwrap() - 1.0).abs())
            .max(inner_product(f, phi).unwrap().abs());
        let c3 = phi.map(|x| x * x * x);
        cube = cube.max(rel(inner_product(f, &c3).unwrap(), m.delta_eta_l));
        monotone &= non_increasing(&p.cubic.energy_history)
            && non_increasing(&p.quintic.energy_history)
            && non_increasing(&p.full.energy_history);
        if p.report.atoms == 1000.0 {
            let r = &p.report;
            dual = dual.max((r.mu2 - (r.mu_tilde - r.mu_1d)).abs() / r.mu_tilde);
        }
    }
    h.check(
        "6a",
        "variance identity",
        variance < 1e-12,
        format!("max rel err {variance:.1e}"),
    );
    h.check(
        "6b",
        "phi10 orthonormality",
        ortho < 1e-10,
        format!("max deviation {ortho:.1e}"),
    );
    h.check(
        "6c",
        "phi10 overlap with phi00 cubed",
        cube < 1e-10,
        format!("max rel err {cube:.1e}"),
    );

    let flat_grid = AxialGrid::new(150.0, 801).unwrap();
    let mut flat = Field1D::from_fn(flat_grid, |_| 1.0 / 300f64.sqrt());
    flat.normalized = true;
    let fm = longitudinal_moments(&flat).unwrap();
    let flat_c = 2.0 * li2.sqrt() * 999.0 * base.scattering_length * fm.delta_eta_l;
    let zero_phi10 = phi10(&flat, &fm).values.iter().all(|v| *v == 0.0);
    h.check(
        "6d",
        "homogeneous trap has no entanglement",
        fm.is_homogeneous() && flat_c == 0.0 && zero_phi10,
        format!("delta_eta_L = {:e}, C = {flat_c:e}", fm.delta_eta_l),
    );

    let single = Condensate::reduced(1.0, base.scattering_length, 1e-2, 2).unwrap();
    let sp = solve_point(
        &single,
        &GridSpec {
            n_rho: 64,
            n_z: 257,
            ..Default::default()
        },
        &settings,
    )
    .unwrap();
    let (c0, c1) = schmidt_projections(&sp.full.psi, &sp.model).unwrap();
    // chi0 is the analytic Gaussian, the 3D solve sees the discrete one
    let sep_mu = rel(sp.full.mu, 1.05);
    h.check(
        "6e",
        "non-interacting separable limit",
        sep_mu < 2e-3 && c1 == 0.0 && (1.0 - c0 * c0) < 1e-5 && sp.model.c1 == 0.0,
        format!(
            "mu_3d = {:.6} (rel err {sep_mu:.1e}), c~0 = {c0:.12}, c~1 = {c1}",
            sp.full.mu
        ),
    );
    h.check(
        "6f",
        "energy monotonicity",
        monotone,
        format!("all 45 solves non-increasing: {monotone}"),
    );

    // second order in dz: linear oscillator mu = omega_L / 2 = 0.05
    let errs: Vec<f64> = [257usize, 513, 1025]
        .iter()
        .map(|&n| {
            let g = AxialGrid::new(40.0, n).unwrap();
            (solve_gp1d(&single, &g, &settings).unwrap().mu - 0.05).abs()
        })
        .collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let refined_spec = GridSpec::default().scaled(2.0).unwrap();
    let q2 = &point(2, 1000.0).condensate;
    let fine = solve_gp3d(q2, &refined_spec.cylindrical(q2).unwrap(), &settings).unwrap();
    let mu_change = rel(fine.mu, point(2, 1000.0).full.mu);
    h.check(
        "6g",
        "grid convergence",
        orders.iter().all(|o| (o - 2.0).abs() < 0.1) && mu_change < 1e-3,
        format!(
            "observed orders {:.3}, {:.3}; 3D mu change on doubling {mu_change:.1e}",
            orders[0], orders[1]
        ),
    );
    h.check(
        "6h",
        "mu2 dual-route consistency at N = 1000",
        dual < 1e-3,
        format!("max |mu2 - (mu~_L - mu1)| / mu~ = {dual:.2e}"),
    );

    // 7. average density
    let mut dominant_ok = true;
    for &q in &POWERS {
        let r = &point(q, 1000.0).report;
        dominant_ok &= (r.avg_density_pert - r.avg_density_dominant).abs()
            < (r.avg_density_dominant - r.avg_density_quasi1d).abs();
    }
    let mut closer_ok = true;
    for p in solved.iter().filter(|p| p.report.atoms <= 3000.0) {
        let r = &p.report;
        closer_ok &= (r.avg_density_pert - r.avg_density_3d).abs()
            < (r.avg_density_quasi1d - r.avg_density_3d).abs();
    }
    h.check(
        "7",
        "average density estimators",
        dominant_ok && closer_ok,
        format!("nonseparable part smaller than quasi-1D gap at N = 1000: {dominant_ok}; psi1 closer to 3D for N <= 3000: {closer_ok}"),
    );

    println!(
        "{} of {} criteria passed in {:.1}s",
        h.total - h.failed.len(),
        h.total,
        start.elapsed().as_secs_f64()
    );
    if !h.failed.is_empty() {
        for f in &h.failed {
            println!("failed: {f}");
        }
        std::process::exit(1);
    }
}
