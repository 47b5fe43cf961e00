//! End-to-end checks of the headline results. Each criterion prints one
//! pass/fail line; the process exits non-zero if any fails.

use std::f64::consts::SQRT_2;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use ctc_core::basis::{ab_bc_terms, correlators, Basis, CorrelatorTerm};
use ctc_core::optimize::{scan_no_violation, seesaw_maximize, InitialState, OptimizerConfig, SharedState, StrategyClass};
use ctc_core::polytope::{
    class_representative, enumerate_vertices, facets, maximize_over_vertices, symmetry_classes,
    symmetry_generators, CausalModel, FacetList, Inequality, LpMode, MembershipOracle, ModelKind, SignedPermutation,
    VertexSet,
};
use ctc_core::protocols::{
    a1_scenario, build_inequality, build_protocol, chsh_decomposition, evaluate, s1bit_scenario, tau3_scenario,
    tau3_settings, InequalityId, NamedProtocol, ProtocolId,
};
use ctc_core::quantum::{message_entropy, mix_white_noise, sequential_behavior, Observable, QState};
use ctc_core::scenario::Scenario;
use ctc_core::Result;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const QMAX: f64 = 4.0 + 2.0 * SQRT_2;
const SEED: u64 = 42;

type Check = fn() -> Result<(bool, String)>;

fn vertices(kind: ModelKind, sc: Scenario) -> Result<VertexSet> {
    enumerate_vertices(&CausalModel::new(kind, sc)?)
}

fn exact_max(ineq: &Inequality, vs: &VertexSet) -> Result<String> {
    let (m, _) = maximize_over_vertices(ineq, &vs.project(&ineq.basis)?)?;
    Ok(m.to_string())
}

fn config() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 100,
        seed: SEED,
        ..Default::default()
    }
}

fn random_settings(rng: &mut ChaCha8Rng) -> Vec<Vec<Observable>> {
    (0..3).map(|_| (0..2).map(|_| Observable::random(rng)).collect()).collect()
}

fn generators(vs: &VertexSet) -> Result<Vec<SignedPermutation>> {
    Ok(symmetry_generators(vs)?.into_iter().map(|(_, g)| g).collect())
}

/// "facet", "facet up to symmetry" or "absent".
fn facet_status(f: &FacetList, vs: &VertexSet, target: &Inequality) -> Result<&'static str> {
    if f.contains(target)? {
        return Ok("facet");
    }
    let g = generators(vs)?;
    let rep = class_representative(target, &g, Some(&f.hull))?;
    let classes = symmetry_classes(&f.inequalities, &g, Some(&f.hull))?;
    Ok(if classes.iter().any(|c| c.representative == rep) {
        "facet up to symmetry"
    } else {
        "absent"
    })
}

fn a1_polytope() -> Result<(VertexSet, FacetList)> {
    let vs = vertices(ModelKind::OneWayMessage { message_dim: 2 }, a1_scenario())?;
    let f = facets(&vs)?;
    Ok((vs, f))
}

/// The dimension witness rewritten in the probability basis of `basis`.
fn dim_witness_in(basis: &Basis) -> Result<Inequality> {
    let dw = build_inequality(InequalityId::DimWitness).inequality;
    let m = dw.basis.functional_matrix()?.expect("correlator basis");
    let mut c = vec![0i64; basis.dim()];
    for (w, row) in dw.coeffs.iter().zip(&m) {
        for (o, r) in c.iter_mut().zip(row) {
            *o += w * r.to_integer();
        }
    }
    Inequality::new(basis.clone(), c, dw.bound)
}

fn s1bit_classical_bound() -> Result<(bool, String)> {
    let vs = vertices(ModelKind::OneWayMessage { message_dim: 2 }, s1bit_scenario())?;
    let m = exact_max(&build_inequality(InequalityId::S1bit).inequality, &vs)?;
    Ok((m == "6", format!("max = {m}")))
}

fn s1bit_quantum_family() -> Result<(bool, String)> {
    let mut err: f64 = 0.0;
    for k in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let fixed = build_protocol(&ProtocolId::OneBitFixed(k))?.behavior()?;
        let opt = build_protocol(&ProtocolId::OneBitOptimized(k))?.behavior()?;
        err = err.max((evaluate(InequalityId::S1bit, &fixed)? - (4.0 + (1.0 + k) * SQRT_2)).abs());
        err = err.max((evaluate(InequalityId::S1bit, &opt)? - (4.0 + 2.0 * (1.0 + k * k).sqrt())).abs());
    }
    Ok((err <= 1e-9, format!("max deviation {err:.1e}")))
}

fn s1bit_seesaw() -> Result<(bool, String)> {
    let class = StrategyClass::BipartitePlusMessage {
        state: SharedState::Schmidt,
        message_dim: 2,
    };
    let r = seesaw_maximize(&build_inequality(InequalityId::S1bit).inequality, &class, &config())?;
    Ok((r.best_value >= QMAX - 1e-6, format!("best {:.10}", r.best_value)))
}

fn tau3_bounds() -> Result<(bool, String)> {
    let vs = vertices(ModelKind::TemporalWeak, tau3_scenario())?;
    let m = exact_max(&build_inequality(InequalityId::Stau3).inequality, &vs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut states = vec![QState::maximally_mixed(2)?, QState::from_bloch([0.0, 0.0, 1.0])?];
    states.extend((0..10).map(|_| QState::random_qubit(&mut rng)));
    let mut err: f64 = 0.0;
    for s in &states {
        let b = sequential_behavior(s, &tau3_settings())?;
        err = err.max((evaluate(InequalityId::Stau3, &b)? - QMAX).abs());
    }
    Ok((
        m == "6" && err <= 1e-9,
        format!("classical max = {m}, quantum deviation {err:.1e} over {} states", states.len()),
    ))
}

fn tau3_facet_recovery() -> Result<(bool, String)> {
    let sc = tau3_scenario();
    let vs = vertices(ModelKind::TemporalWeak, sc.clone())?.project(&Basis::correlator(sc.clone(), ab_bc_terms(&sc))?)?;
    let f = facets(&vs)?;
    let status = facet_status(&f, &vs, &build_inequality(InequalityId::Stau3).inequality)?;
    Ok((status != "absent", format!("{status} among {} facets", f.inequalities.len())))
}

fn a1_facet_count() -> Result<(bool, String)> {
    let (vs, f) = a1_polytope()?;
    let status = facet_status(&f, &vs, &dim_witness_in(&vs.basis)?)?;
    let n = f.inequalities.len();
    Ok((n == 864 && status != "absent", format!("{n} facets, witness {status}")))
}

fn a1_no_violation() -> Result<(bool, String)> {
    let (vs, f) = a1_polytope()?;
    let classes = symmetry_classes(&f.inequalities, &generators(&vs)?, Some(&f.hull))?;
    let reps: Vec<Inequality> = classes.into_iter().map(|c| c.representative).collect();
    let class = StrategyClass::SequentialQubit {
        initial: InitialState::Free,
    };
    let report = scan_no_violation(&reps, &class, &config())?;
    Ok((
        report.flagged == 0,
        format!("{} flagged over {} classes, max excess {:.1e}", report.flagged, reps.len(), report.max_excess),
    ))
}

fn temporal_containment() -> Result<(bool, String)> {
    let vs = vertices(ModelKind::TemporalFull, tau3_scenario())?;
    let oracle = MembershipOracle::new(&vs)?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let n = 200;
    let mut inside = 0;
    for _ in 0..n {
        let init = QState::random_qubit(&mut rng);
        let b = sequential_behavior(&init, &random_settings(&mut rng))?;
        if oracle.query(b.values(), LpMode::Float, 1e-9)?.inside {
            inside += 1;
        }
    }
    Ok((inside == n, format!("{inside}/{n} inside")))
}

fn identity_suite() -> Result<(bool, String)> {
    let mut terms = Vec::new();
    for x in 0..2 {
        for y in 0..2 {
            for z in 0..2 {
                let at = vec![Some(x), Some(y), Some(z)];
                terms.push(CorrelatorTerm::new(vec![0, 1, 2], at.clone()));
                terms.push(CorrelatorTerm::new(vec![0], at.clone()));
                terms.push(CorrelatorTerm::new(vec![1, 2], at));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut fact: f64 = 0.0;
    for _ in 0..100 {
        let init = QState::random_qubit(&mut rng);
        let b = sequential_behavior(&init, &random_settings(&mut rng))?;
        let c: Vec<f64> = correlators(&b, &terms)?.into_iter().map(|(_, v)| v).collect();
        for (i, t) in c.chunks(3).enumerate() {
            fact = fact.max((t[0] - t[1] * t[2]).abs());
            // same (y, z) with x = 1 is four triples further on
            if i < 4 {
                fact = fact.max((t[2] - c[3 * (i + 4) + 2]).abs());
            }
        }
    }
    let mut resid: f64 = 0.0;
    for i in 0..=20 {
        let b = build_protocol(&ProtocolId::OneBitOptimized(i as f64 / 20.0))?.behavior()?;
        resid = resid.max(chsh_decomposition(&b)?.residual.abs());
    }
    let h = match build_protocol(&ProtocolId::OneBitFixed(1.0))? {
        NamedProtocol::Comm { protocol, .. } => message_entropy(&protocol, None, None)?,
        NamedProtocol::Sequential { .. } => unreachable!("one-bit protocols communicate"),
    };
    Ok((
        fact <= 1e-12 && resid <= 1e-10 && (h - 0.9183).abs() <= 1e-4,
        format!("factorization {fact:.1e}, S_1bit - 4 - S_CHSH {resid:.1e}, H(m) = {h:.4}"),
    ))
}

fn visibility_fits() -> Result<(bool, String)> {
    let comm = build_protocol(&ProtocolId::OneBitOptimized(1.0))?.behavior()?;
    let s1 = evaluate(InequalityId::S1bit, &mix_white_noise(&comm, 6.66 / QMAX)?)?;
    let seq = build_protocol(&ProtocolId::Tau3(QState::maximally_mixed(2)?))?.behavior()?;
    let s3 = evaluate(InequalityId::Stau3, &mix_white_noise(&seq, 6.65 / QMAX)?)?;
    Ok((
        (s1 - 6.66).abs() <= 0.01 && (s3 - 6.65).abs() <= 0.01,
        format!("S_1bit = {s1:.4}, S_tau3 = {s3:.4} (illustrative)"),
    ))
}

fn main() -> ExitCode {
    let criteria: [(&str, Check, u64); 10] = [
        ("1 S_1bit classical bound", s1bit_classical_bound, 10),
        ("2 S_1bit quantum family", s1bit_quantum_family, u64::MAX),
        ("3 S_1bit see-saw optimum", s1bit_seesaw, 60),
        ("4 S_tau3 classical and quantum values", tau3_bounds, u64::MAX),
        ("5 S_tau3 facet recovery", tau3_facet_recovery, 300),
        ("6 3x2 one-bit polytope facets", a1_facet_count, 600),
        ("7 sequential qubit no-violation scan", a1_no_violation, 1800),
        ("8 temporal containment", temporal_containment, u64::MAX),
        ("9 identity suite", identity_suite, u64::MAX),
        ("10 white-noise visibility fits", visibility_fits, u64::MAX),
    ];
    let mut failed = 0;
    for (name, check, limit) in criteria {
        let t = Instant::now();
        let (ok, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let elapsed = t.elapsed();
        let in_time = elapsed <= Duration::from_secs(limit);
        let pass = ok && in_time;
        if !pass {
            failed += 1;
        }
        let late = if in_time { String::new() } else { format!(", over the {limit} s limit") };
        println!(
            "{} {name}: {detail} [{:.2} s{late}]",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
