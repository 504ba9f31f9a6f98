//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, FRAC_PI_8};
use std::panic::{self, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::Rng;

use qlds::additivity::{verify_proposition1_with, AdditivityOperator, DensityMatrix};
use qlds::chsh::{self, Label, MeasurementSetup, Observable, Su2Setting};
use qlds::ds::{self, delta, AdditiveMeasure, Frame, MassFunction};
use qlds::finite_qm::{CoherentFamily, FiniteSystem};
use qlds::lattice::meet_all;
use qlds::linalg::{commutator, cr, real_matrix, CMatrix};
use qlds::random::{self, ginibre};
use qlds::{BooleanAlgebra, Error, Subspace};

type Outcome = Result<String, String>;

fn check(cond: bool, what: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(what())
    }
}

fn max_entry_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn h3_example() -> Outcome {
    let build = || {
        let h1 = Subspace::span_vectors(3, &[vec![cr(1.0), cr(0.0), cr(0.0)]]).unwrap();
        let h2 = Subspace::span_vectors(3, &[vec![cr(1.0), cr(1.0), cr(0.0)]]).unwrap();
        let op = AdditivityOperator::new(&h1, &h2).unwrap();
        let comm = commutator(h1.projector(), h2.projector());
        (h1, h2, op, comm)
    };
    // warm up, then take the fastest of several runs
    let _ = build();
    let mut best = Duration::MAX;
    for _ in 0..20 {
        let t = Instant::now();
        let r = build();
        best = best.min(t.elapsed());
        drop(r);
    }
    let (h1, h2, op, comm) = build();
    let d_expected = real_matrix(
        &[&[-1.0, -1.0, 0.0], &[-1.0, 1.0, 0.0], &[0.0, 0.0, 0.0]],
        0.5,
    );
    let c_expected = real_matrix(
        &[&[0.0, 1.0, 0.0], &[-1.0, 0.0, 0.0], &[0.0, 0.0, 0.0]],
        0.5,
    );
    let d_err = max_entry_diff(op.matrix(), &d_expected);
    let c_err = max_entry_diff(&comm, &c_expected);
    let e3 = (&comm - op.matrix() * (h1.projector() - h2.projector())).norm();
    check(d_err <= 1e-12, || {
        format!("operator entry error {d_err:.2e}")
    })?;
    check(c_err <= 1e-12, || {
        format!("commutator entry error {c_err:.2e}")
    })?;
    check(e3 <= 1e-12, || {
        format!("commutator identity residual {e3:.2e}")
    })?;
    check(best < Duration::from_millis(1), || {
        format!("runtime {best:?}")
    })?;
    Ok(format!(
        "max entry error {:.1e}, identity residual {e3:.1e}, {best:?}",
        d_err.max(c_err)
    ))
}

/// Pairs from the random suite: generic random subspaces and pairs drawn from
/// a random Boolean algebra (which commute by construction).
fn random_suite() -> Vec<(Subspace, Subspace, bool)> {
    let mut rng = random::seeded(2024);
    let mut pairs = Vec::new();
    for i in 0..600 {
        let d = rng.random_range(2..=8);
        if i % 2 == 0 {
            let k1 = rng.random_range(0..=d);
            let k2 = rng.random_range(0..=d);
            let h1 = Subspace::span(&ginibre(&mut rng, d, k1)).unwrap();
            let h2 = Subspace::span(&ginibre(&mut rng, d, k2)).unwrap();
            pairs.push((h1, h2, false));
        } else {
            let algebra = BooleanAlgebra::from_basis(random::unitary(&mut rng, d)).unwrap();
            let m1 = rng.random_range(0..algebra.len());
            let m2 = rng.random_range(0..algebra.len());
            pairs.push((
                algebra.element(m1).unwrap(),
                algebra.element(m2).unwrap(),
                true,
            ));
        }
    }
    pairs
}

fn proposition1_suite(suite: &[(Subspace, Subspace, bool)]) -> Outcome {
    let mut worst: f64 = 0.0;
    let (mut commuting, mut generic) = (0, 0);
    for (h1, h2, constructed) in suite {
        let r = verify_proposition1_with(h1, h2, 1e-9).map_err(|e| e.to_string())?;
        worst = worst.max(r.residuals.max());
        check(r.residuals.max() <= 1e-9, || {
            format!("residuals {:?} (d = {})", r.residuals, h1.ambient_dim())
        })?;
        check(r.equivalence.consistent(), || {
            format!("equivalence disagrees: {:?}", r.equivalence)
        })?;
        if *constructed {
            check(r.equivalence.operator_zero, || {
                "constructed pair does not commute".into()
            })?;
            commuting += 1;
        } else {
            generic += 1;
        }
    }
    Ok(format!(
        "{} pairs ({commuting} commuting by construction, {generic} random), worst residual {worst:.1e}",
        suite.len()
    ))
}

fn modularity(suite: &[(Subspace, Subspace, bool)]) -> Outcome {
    for (h1, h2, _) in suite {
        let join = h1.join(h2).map_err(|e| e.to_string())?;
        let meet = h1.meet(h2).map_err(|e| e.to_string())?;
        check(join.dim() + meet.dim() == h1.dim() + h2.dim(), || {
            format!(
                "dim {} + {} != {} + {} in H({})",
                join.dim(),
                meet.dim(),
                h1.dim(),
                h2.dim(),
                h1.ambient_dim()
            )
        })?;
    }
    Ok(format!("{} pairs, exact integer ranks", suite.len()))
}

fn table4() -> Outcome {
    let mut rng = random::seeded(44);
    let (mut worst_cell, mut worst_sum): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let s = Su2Setting::random(&mut rng);
        let t = chsh::probability_table(&s).map_err(|e| e.to_string())?;
        worst_cell = worst_cell.max(t.residual);
        for obs in Observable::ALL {
            worst_sum = worst_sum.max((t.row_sum(obs) - 1.0).abs());
        }
    }
    check(worst_cell <= 1e-10, || {
        format!("cell disagreement {worst_cell:.2e}")
    })?;
    check(worst_sum <= 1e-12, || {
        format!("row sum off by {worst_sum:.2e}")
    })?;
    Ok(format!(
        "100 settings, cell residual {worst_cell:.1e}, row sums {worst_sum:.1e}"
    ))
}

fn chsh_violation() -> Outcome {
    let lhs =
        |theta: f64| chsh::chsh_lhs(&Su2Setting::from_theta(theta)).map_err(|e| e.to_string());
    let v = lhs(FRAC_PI_8)?;
    let expected = 2.5 + FRAC_1_SQRT_2;
    check((v - expected).abs() <= 1e-9 && v > 3.0, || {
        format!("π/8 gives {v}")
    })?;
    for theta in [0.0, FRAC_PI_4] {
        let b = lhs(theta)?;
        check((b - 3.0).abs() <= 1e-9, || format!("θ = {theta} gives {b}"))?;
    }
    Ok(format!("π/8 → {v:.10}, θ ∈ {{0, π/4}} → 3"))
}

fn boole() -> Outcome {
    let r = chsh::boole_violation(&Su2Setting::from_theta(FRAC_PI_8)).map_err(|e| e.to_string())?;
    let expected = 1.5 - FRAC_1_SQRT_2;
    check(
        (r.lhs_sum - expected).abs() <= 1e-9 && r.lhs_sum < 1.0,
        || format!("sum of complements {}", r.lhs_sum),
    )?;
    check((r.joint - 1.0).abs() <= 1e-12, || {
        format!("joint probability {}", r.joint)
    })?;
    Ok(format!("sum {:.10} < joint {:.12}", r.lhs_sum, r.joint))
}

fn product_terms() -> Outcome {
    let mut rng = random::seeded(756);
    let mut worst: f64 = 0.0;
    let mut meets_zero = true;
    for _ in 0..20 {
        let r = chsh::verify_meet_zero(&Su2Setting::random(&mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max(r.max_term_norm);
        meets_zero &= r.meet_dim == 0;
    }
    let detail =
        format!("meet dimension 0 at all settings: {meets_zero}; largest term norm {worst:.3e}");
    check(meets_zero, || detail.clone())?;
    check(worst <= 1e-10, || format!("{detail} (terms do not vanish)"))?;
    Ok(detail)
}

fn boolean_algebras() -> Outcome {
    let mut rng = random::seeded(8);
    let s = Su2Setting::random(&mut rng);
    let setup = MeasurementSetup::new(s).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for obs in [Observable::A, Observable::B] {
        let algebra = setup.algebra(obs);
        let named: Vec<u64> = Label::all().map(|l| l.mask()).collect();
        for label in Label::all() {
            let p = setup.element(obs, label);
            let q = chsh::closed_form_projector(&s, obs, label);
            worst = worst.max(max_entry_diff(p.projector(), &q));
        }
        // 𝒪 and ℐ complete the sixteen
        worst = worst.max(algebra.element(0).unwrap().projector().norm());
        worst = worst.max(max_entry_diff(
            algebra.element(15).unwrap().projector(),
            &CMatrix::identity(4, 4),
        ));
        let mut all: Vec<u64> = named.into_iter().chain([0, 15]).collect();
        all.sort_unstable();
        all.dedup();
        check(all.len() == 16, || {
            format!("{obs}: named masks cover {} elements", all.len())
        })?;
        let counts = algebra.counts_by_dimension();
        check(counts == vec![1, 4, 6, 4, 1], || {
            format!("{obs}: counts {counts:?}")
        })?;
    }
    check(worst <= 1e-12, || {
        format!("projector entry error {worst:.2e}")
    })?;
    let h5 = setup
        .element(Observable::A, Label::new(5))
        .distance(&setup.element(Observable::B, Label::new(5)))
        .map_err(|e| e.to_string())?;
    check(h5 <= 1e-12, || format!("H5A vs H5B distance {h5:.2e}"))?;
    Ok(format!(
        "entry error {worst:.1e}, H5A/H5B distance {h5:.1e}, counts (1,4,6,4,1)"
    ))
}

fn coherent_states() -> Outcome {
    let mut worst = [0.0f64; 3];
    for (d, seed) in [(3, 31), (5, 51), (7, 71)] {
        let fam = CoherentFamily::random(FiniteSystem::new(d).map_err(|e| e.to_string())?, seed);
        let r = fam.verify().map_err(|e| e.to_string())?;
        worst[0] = worst[0].max(r.resolution_residual);
        worst[1] = worst[1].max(r.overlap_residual);
        worst[2] = worst[2].max(r.pair_residual);
    }
    check(worst[0] <= 1e-10, || {
        format!("resolution residual {:.2e}", worst[0])
    })?;
    check(worst[1] <= 1e-10, || {
        format!("overlap residual {:.2e}", worst[1])
    })?;
    check(worst[2] <= 1e-9, || {
        format!("closed-form operator residual {:.2e}", worst[2])
    })?;
    for d in [2, 4, 6] {
        check(FiniteSystem::new(d) == Err(Error::EvenDimension(d)), || {
            format!("d = {d} accepted")
        })?;
    }
    Ok(format!(
        "d ∈ {{3,5,7}}: resolution {:.1e}, overlap {:.1e}, pair operator {:.1e}; even d rejected",
        worst[0], worst[1], worst[2]
    ))
}

fn classical_ds() -> Outcome {
    let mut rng = random::seeded(10);
    let mut witness = None;
    let mut pairs = 0;
    for i in 0..200 {
        let n = 1 + i % 5;
        let m = MassFunction::random(&mut rng, Frame::new(n).unwrap(), 6);
        let r = ds::check_table1_exhaustive(&m);
        pairs += r.pairs_checked;
        if let Some(bad) = r.rows.iter().find(|row| !row.passed) {
            return Err(format!("mass {:?}: {:?}", m.focal_elements(), bad));
        }
        if witness.is_none() {
            witness = r.lower_boole_violation;
        }
    }
    let w = witness.ok_or("no lower-probability Boole witness generated")?;
    // dyadic probabilities add exactly in binary floating point
    for _ in 0..50 {
        let n = rng.random_range(1..=5);
        let mut units: Vec<u32> = (0..n).map(|_| rng.random_range(0..16)).collect();
        let total: u32 = units.iter().sum();
        if total == 0 {
            units[0] = 1;
        }
        let total: u32 = units.iter().sum();
        let scale = total.next_power_of_two();
        units[0] += scale - total;
        let q = AdditiveMeasure::new(units.iter().map(|&u| u as f64 / scale as f64).collect())
            .map_err(|e| e.to_string())?;
        let full = (1u32 << n) - 1;
        for a in 0..=full {
            for b in 0..=full {
                let v = delta(&q, a, b).map_err(|e| e.to_string())?;
                check(v == 0.0, || {
                    format!("δ({a:#b},{b:#b}) = {v:e} for {:?}", q.probabilities())
                })?;
            }
        }
    }
    Ok(format!(
        "200 mass functions, {pairs} subset pairs; δ = 0 exactly; witness ℓ(A)+ℓ(B)−ℓ(A∪B) = {} at A={:#b}, B={:#b}",
        w.value, w.a, w.b
    ))
}

fn proposition2() -> Outcome {
    let mut rng = random::seeded(77);
    let mut families = 0;
    let mut worst_slack = f64::INFINITY;
    while families < 60 {
        let algebra = BooleanAlgebra::from_basis(random::unitary(&mut rng, 4)).unwrap();
        let n = rng.random_range(2..=5);
        let family: Vec<Subspace> = (0..n)
            .map(|_| algebra.element(rng.random_range(1..16)).unwrap())
            .collect();
        if !meet_all(&family).map_err(|e| e.to_string())?.is_zero() {
            continue;
        }
        let rho = DensityMatrix::random(&mut rng, 4);
        let r = chsh::proposition2_bound(&family, &rho).map_err(|e| e.to_string())?;
        check(r.sum <= r.bound + 1e-9, || {
            format!("commuting family: {} > {}", r.sum, r.bound)
        })?;
        worst_slack = worst_slack.min(r.bound - r.sum);
        families += 1;
    }
    let setup =
        MeasurementSetup::new(Su2Setting::from_theta(FRAC_PI_8)).map_err(|e| e.to_string())?;
    let family = setup.chsh_family().map_err(|e| e.to_string())?;
    let r = chsh::proposition2_bound(&family, &chsh::bell_density()).map_err(|e| e.to_string())?;
    check(!r.satisfied, || {
        format!("CHSH family satisfies the bound: {}", r.sum)
    })?;
    Ok(format!(
        "{families} commuting families within bound (min slack {worst_slack:.3}); CHSH family {:.7} > {}",
        r.sum, r.bound
    ))
}

fn cli_runs() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_qlds");
    let runs: [&[&str]; 5] = [
        &["chsh", "--theta", "0.39269908169872414", "--no-timestamp"],
        &["lattice-demo", "--no-timestamp"],
        &["coherent", "--d", "3", "--seed", "7", "--no-timestamp"],
        &["ds-table1", "--employees", "2,3,5", "--no-timestamp"],
        &["chsh", "--sweep", "0:1.5708:64", "--csv"],
    ];
    for args in runs {
        let out = Command::new(bin)
            .args(args)
            .env_remove("QLDS_TOL")
            .output()
            .map_err(|e| e.to_string())?;
        check(out.status.success(), || {
            format!(
                "qlds {} exited with {:?}",
                args.join(" "),
                out.status.code()
            )
        })?;
    }
    Ok(format!("{} CLI runs succeeded", runs.len()))
}

fn run(name: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        let msg = p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_default();
        Err(format!("panicked: {msg}"))
    });
    let took = start.elapsed();
    match &outcome {
        Ok(detail) => println!("PASS  {name}: {detail} [{took:.2?}]"),
        Err(detail) => println!("FAIL  {name}: {detail} [{took:.2?}]"),
    }
    outcome.is_ok()
}

fn main() {
    panic::set_hook(Box::new(|_| {}));
    let start = Instant::now();
    let suite = random_suite();
    let results = [
        run("01 H(3) example", h3_example),
        run("02 additivity operator identities", || {
            proposition1_suite(&suite)
        }),
        run("03 modularity", || modularity(&suite)),
        run("04 Bell-state probability table", table4),
        run("05 CHSH violation", chsh_violation),
        run("06 Boole violation", boole),
        run("07 vanishing projector products", product_terms),
        run("08 Boolean algebras of the measurements", boolean_algebras),
        run("09 coherent states", coherent_states),
        run("10 lower/upper probability properties", classical_ds),
        run("11 sum bound for families with zero meet", proposition2),
    ];
    let last = run("12 library and CLI within 60 s", || {
        let cli = cli_runs()?;
        let total = start.elapsed();
        check(total <= Duration::from_secs(60), || {
            format!("{cli}; total {total:?}")
        })?;
        Ok(format!("{cli}; total {total:.2?}"))
    });
    let passed = results.iter().filter(|&&ok| ok).count() + usize::from(last);
    println!("{passed}/12 criteria passed");
    if passed != 12 {
        std::process::exit(1);
    }
}
