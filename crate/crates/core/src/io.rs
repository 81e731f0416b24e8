//! JSON artifacts. Segment coefficients are written as decimal strings with
//! 17 significant digits, which round-trips every `f64` exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mechanism::{MechanismParams, Rule, SingleAgentMechanism};
use crate::piecewise::{Basis, PiecewiseFn, Segment};

pub const SCHEMA_VERSION: u32 = 1;

pub fn exact(v: f64) -> String {
    format!("{v:.16e}")
}

/// A coefficient as stored on disk: canonical string, or a plain number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Text(String),
    Value(f64),
}

impl Num {
    fn get(&self, ctx: &str) -> Result<f64> {
        match self {
            Num::Value(v) => Ok(*v),
            Num::Text(s) => s.trim().parse::<f64>().map_err(|e| Error::Parse {
                context: ctx.to_string(),
                message: format!("{s:?} is not a number ({e})"),
            }),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SegmentJson {
    lo: Num,
    hi: Num,
    c_m1: Num,
    c0: Num,
    c1: Num,
    c2: Num,
    ch: Num,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct MechanismJson {
    version: u32,
    kind: String,
    rule: Rule,
    params: MechanismParams,
    allocation: Vec<SegmentJson>,
    payment: Vec<SegmentJson>,
}

fn segments_json(f: &PiecewiseFn) -> Vec<SegmentJson> {
    let t = |v: f64| Num::Text(exact(v));
    f.segments()
        .iter()
        .map(|s| SegmentJson {
            lo: t(s.lo),
            hi: t(s.hi),
            c_m1: t(s.f.inv),
            c0: t(s.f.c0),
            c1: t(s.f.c1),
            c2: t(s.f.c2),
            ch: t(s.f.sqrt),
        })
        .collect()
}

fn segments_from(list: &[SegmentJson], field: &str) -> Result<PiecewiseFn> {
    let mut segs = Vec::with_capacity(list.len());
    for (k, s) in list.iter().enumerate() {
        let at = |name: &str| format!("{field}[{k}].{name}");
        segs.push(Segment {
            lo: s.lo.get(&at("lo"))?,
            hi: s.hi.get(&at("hi"))?,
            f: Basis {
                inv: s.c_m1.get(&at("c_m1"))?,
                c0: s.c0.get(&at("c0"))?,
                c1: s.c1.get(&at("c1"))?,
                c2: s.c2.get(&at("c2"))?,
                sqrt: s.ch.get(&at("ch"))?,
            },
        });
    }
    PiecewiseFn::new(segs).map_err(|e| match e {
        Error::Invariant(m) => Error::Invariant(format!("{field}: {m}")),
        other => other,
    })
}

pub(crate) fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        context: format!("line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    }
}

pub fn mechanism_to_json(m: &SingleAgentMechanism) -> String {
    let doc = MechanismJson {
        version: SCHEMA_VERSION,
        kind: "single_agent".into(),
        rule: m.rule,
        params: m.params,
        allocation: segments_json(&m.allocation),
        payment: segments_json(&m.payment),
    };
    serde_json::to_string_pretty(&doc).expect("mechanism serializes")
}

pub fn mechanism_from_json(text: &str) -> Result<SingleAgentMechanism> {
    let doc: MechanismJson = serde_json::from_str(text).map_err(parse_error)?;
    if doc.version != SCHEMA_VERSION {
        return Err(Error::Parse {
            context: "version".into(),
            message: format!("unsupported schema version {}", doc.version),
        });
    }
    if doc.kind != "single_agent" {
        return Err(Error::Parse {
            context: "kind".into(),
            message: format!("expected \"single_agent\", found {:?}", doc.kind),
        });
    }
    let allocation = segments_from(&doc.allocation, "allocation")?;
    let payment = segments_from(&doc.payment, "payment")?;
    SingleAgentMechanism::new(doc.rule, doc.params, allocation, payment)
}

/// The `kind` tag of a JSON artifact, if present.
pub fn artifact_kind(text: &str) -> Result<String> {
    #[derive(Deserialize)]
    struct Tag {
        kind: String,
    }
    let tag: Tag = serde_json::from_str(text).map_err(parse_error)?;
    Ok(tag.kind)
}
