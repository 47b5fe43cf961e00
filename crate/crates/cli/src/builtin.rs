//! `builtin:` names for models, bases, inequalities and protocols, with
//! file paths accepted wherever a builtin is.

use std::path::Path;

use ctc_core::basis::{ab_bc_terms, ab_terms, full_correlator_terms, second_party_terms, Basis};
use ctc_core::io::{read_json, InequalityFile, ProtocolFile};
use ctc_core::optimize::Strategy;
use ctc_core::polytope::{CausalModel, Inequality, ModelKind};
use ctc_core::protocols::{a1_scenario, build_inequality, build_protocol, s1bit_scenario, tau3_scenario};
use ctc_core::protocols::{InequalityId, NamedProtocol, ProtocolId};
use ctc_core::quantum::QState;
use ctc_core::scenario::Scenario;
use ctc_core::{Error, Result};

pub const MODELS: &[&str] = &["s1bit", "a1", "tau3-weak", "tau3-full", "chsh-lhv"];
pub const BASES: &[&str] = &["probability", "ab", "ab-bc", "second-party", "correlators"];
pub const PROTOCOLS: &[&str] = &["one-bit-fixed:<kappa>", "one-bit-optimized:<kappa>", "tau3", "tau3:<x>,<y>,<z>"];

fn strip(name: &str) -> Option<&str> {
    name.strip_prefix("builtin:")
}

fn unknown(kind: &str, name: &str, known: &[&str]) -> Error {
    Error::InvalidInput(format!("unknown builtin {kind} {name:?} (known: {})", known.join(", ")))
}

pub fn model(spec: &str) -> Result<CausalModel> {
    let Some(name) = strip(spec) else {
        return read_json(Path::new(spec));
    };
    let (kind, sc) = match name {
        "s1bit" => (ModelKind::OneWayMessage { message_dim: 2 }, s1bit_scenario()),
        "a1" => (ModelKind::OneWayMessage { message_dim: 2 }, a1_scenario()),
        "tau3-weak" => (ModelKind::TemporalWeak, tau3_scenario()),
        "tau3-full" => (ModelKind::TemporalFull, tau3_scenario()),
        "chsh-lhv" => (ModelKind::Lhv, Scenario::from_shape(&[(2, 2), (2, 2)], &[])?),
        _ => return Err(unknown("model", name, MODELS)),
    };
    CausalModel::new(kind, sc)
}

/// Basis by name over `sc`, or a basis file.
pub fn basis(spec: &str, sc: &Scenario) -> Result<Basis> {
    let name = strip(spec).unwrap_or(spec);
    let terms = match name {
        "probability" => return Ok(Basis::probability(sc.clone())),
        "ab" => ab_terms(sc),
        "ab-bc" => ab_bc_terms(sc),
        "second-party" => second_party_terms(sc),
        "correlators" => full_correlator_terms(sc),
        _ if strip(spec).is_some() => return Err(unknown("basis", name, BASES)),
        _ => {
            let f: ctc_core::io::BasisFile = read_json(Path::new(spec))?;
            let b = f.to_basis()?;
            if !b.scenario.same_layout(sc) {
                return Err(Error::InvalidInput("basis file belongs to a different scenario".into()));
            }
            return Ok(b);
        }
    };
    Basis::correlator(sc.clone(), terms)
}

pub fn inequality(spec: &str) -> Result<Inequality> {
    match strip(spec) {
        Some(name) => {
            let id: InequalityId = name.parse()?;
            Ok(build_inequality(id).inequality)
        }
        None => {
            let f: InequalityFile = read_json(Path::new(spec))?;
            f.to_inequality()
        }
    }
}

fn parse_f64(s: &str) -> Result<f64> {
    s.trim()
        .parse()
        .map_err(|_| Error::InvalidInput(format!("bad number {s:?}")))
}

pub fn protocol(spec: &str) -> Result<Strategy> {
    let Some(name) = strip(spec) else {
        // an optimize report carries its best protocol
        let v: serde_json::Value = read_json(Path::new(spec))?;
        let v = match v.get("protocol") {
            Some(p) if v.get("best_value").is_some() => p.clone(),
            _ => v,
        };
        let f: ProtocolFile = serde_json::from_value(v)?;
        return f.to_strategy();
    };
    let (head, arg) = match name.split_once(':') {
        Some((h, a)) => (h, Some(a)),
        None => (name, None),
    };
    let id = match (head, arg) {
        ("one-bit-fixed", Some(k)) => ProtocolId::OneBitFixed(parse_f64(k)?),
        ("one-bit-optimized", Some(k)) => ProtocolId::OneBitOptimized(parse_f64(k)?),
        ("tau3", None) => ProtocolId::Tau3(QState::maximally_mixed(2)?),
        ("tau3", Some(r)) => {
            let v: Vec<f64> = r.split(',').map(parse_f64).collect::<Result<_>>()?;
            let r: [f64; 3] = v
                .try_into()
                .map_err(|_| Error::InvalidInput("tau3 initial state needs three Bloch components".into()))?;
            ProtocolId::Tau3(QState::from_bloch(r)?)
        }
        _ => return Err(unknown("protocol", name, PROTOCOLS)),
    };
    Ok(match build_protocol(&id)? {
        NamedProtocol::Comm { state, protocol } => Strategy::Bipartite { state, protocol },
        NamedProtocol::Sequential { initial, settings } => Strategy::Sequential { initial, settings },
    })
}
