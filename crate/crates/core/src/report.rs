//! Machine-readable reports. Every scalar is a string (`"p/q"`, or plain
//! digits for integers) so no precision is lost; keys keep a fixed order,
//! making output byte-identical across runs.

use serde_json::{json, Map, Value};

use crate::engine::{CheckReport, Gfp, IterationOutcome, Verdict};
use crate::scalar::Scalar;
use crate::valuation::{Subset, Valuation};

pub fn scalar<T: Scalar>(x: &T) -> Value {
    Value::String(x.to_fraction_string())
}

pub fn subset(s: &Subset) -> Value {
    Value::Array(s.elements().map(|e| Value::String(e.to_string())).collect())
}

pub fn valuation<T: Scalar>(v: &Valuation<T>) -> Value {
    let mut m = Map::new();
    for (e, x) in v.entries() {
        m.insert(e.to_string(), scalar(x));
    }
    Value::Object(m)
}

fn object<T: Scalar>(
    mode: &str,
    is_fixpoint: bool,
    verdict: Verdict,
    witness: &Subset,
    delta: Option<&T>,
    corrected: Option<&Valuation<T>>,
    iterations: Vec<Value>,
) -> Value {
    json!({
        "mode": mode,
        "is_fixpoint": is_fixpoint,
        "verdict": verdict.as_str(),
        "witness": subset(witness),
        "suggested_delta": delta.map_or(Value::Null, scalar),
        "corrected": corrected.map_or(Value::Null, valuation),
        "iterations": iterations,
    })
}

pub fn check_report<T: Scalar>(r: &CheckReport<T>) -> Value {
    object(
        r.mode().as_str(),
        r.is_fixpoint(),
        r.verdict(),
        r.witness(),
        r.suggested_delta(),
        r.corrected(),
        r.iterations().iter().map(subset).collect(),
    )
}

/// `f(a)` in `corrected`; the witness is where `f(a)` and `a` differ.
pub fn eval_report<T: Scalar>(a: &Valuation<T>, fa: &Valuation<T>) -> Value {
    let diff = a.disagreement_set(fa).expect("same domain");
    let verdict = if diff.is_empty() { Verdict::Confirmed } else { Verdict::Refuted };
    object("eval", diff.is_empty(), verdict, &diff, None, Some(fa), Vec::new())
}

/// Refuted when the greatest fixpoint is nonempty; inconclusive off fixpoints.
pub fn gfp_report<T: Scalar>(is_fixpoint: bool, g: &Gfp) -> Value {
    let verdict = match (is_fixpoint, g.gfp.is_empty()) {
        (false, _) => Verdict::Inconclusive,
        (true, true) => Verdict::Confirmed,
        (true, false) => Verdict::Refuted,
    };
    object::<T>("gfp-approx", is_fixpoint, verdict, &g.gfp, None, None, g.iterations.iter().map(subset).collect())
}

/// One entry per round; `corrected` holds the final value.
pub fn iterate_report<T: Scalar>(o: &IterationOutcome<T>) -> Value {
    let last = o.rounds.last().and_then(|r| r.report.as_ref());
    let verdict = if o.confirmed { Verdict::Confirmed } else { Verdict::Inconclusive };
    let empty = Subset::empty(o.result.domain());
    let rounds = o
        .rounds
        .iter()
        .map(|r| {
            json!({
                "reached": valuation(&r.reached),
                "descent_steps": r.descent_steps,
                "residual": scalar(&r.residual),
                "verdict": r.report.as_ref().map_or(Value::Null, |c| c.verdict().as_str().into()),
                "witness": r.report.as_ref().map_or(Value::Null, |c| subset(c.witness())),
                "suggested_delta": r.report.as_ref().and_then(|c| c.suggested_delta()).map_or(Value::Null, scalar),
            })
        })
        .collect();
    object(
        "iterate",
        o.residual.is_zero(),
        verdict,
        last.map_or(&empty, |c| c.witness()),
        last.and_then(|c| c.suggested_delta()),
        Some(&o.result),
        rounds,
    )
}

/// Pretty-printed with a trailing newline.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}
