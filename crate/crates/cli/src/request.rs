//! Serializable commands and their evaluation.
//!
//! A request embeds every input it needs, so an artifact holding the
//! request and its result can be recomputed and compared later.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use slope_lab::exactnum::{format_rational, serde_rational, serde_rational_vec};
use slope_lab::filtration::{scalar_product, Filtration};
use slope_lab::gitstab::{
    big_lambda, is_semistable_with, kempf_minimize, mu_invariant, rr_reduce_with, tensor_lambda, AlgValue,
    KempfOptions, LineBundle, Stability, TensorPoint,
};
use slope_lab::harness::{Check, TrialConfig};
use slope_lab::invariants::{
    det_tensor, invariant_witness_search, semistable_degree_bound, sharp_degree_bound, SumPoint,
};
use slope_lab::lattice::{hn_filtration, mu_max, udeg_max, Lattice};
use slope_lab::{Error, LogValue, Rational, Result};

/// Bits behind the decimal renderings of exact values.
pub const DECIMAL_BITS: u32 = 30;

/// Sample count of the semistability search on reduced points.
const REDUCE_SAMPLES: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", deny_unknown_fields)]
pub enum Request {
    #[serde(rename = "lat info")]
    LatInfo { lattice: Lattice },
    #[serde(rename = "lat dual")]
    LatDual { lattice: Lattice },
    #[serde(rename = "lat sum")]
    LatSum { lattices: Vec<Lattice> },
    #[serde(rename = "lat tensor")]
    LatTensor { lattices: Vec<Lattice> },
    #[serde(rename = "lat ext")]
    LatExt { lattice: Lattice, k: usize },
    #[serde(rename = "lat hn")]
    LatHn { lattice: Lattice },
    #[serde(rename = "lat mumax")]
    LatMumax { lattice: Lattice },
    #[serde(rename = "lat udeg")]
    LatUdeg { lattice: Lattice },
    #[serde(rename = "fil eval")]
    FilEval {
        filtration: Filtration,
        #[serde(with = "serde_rational_vec")]
        vector: Vec<Rational>,
    },
    #[serde(rename = "fil tensor")]
    FilTensor { filtrations: Vec<Filtration> },
    #[serde(rename = "fil scalar")]
    FilScalar { left: Filtration, right: Filtration },
    #[serde(rename = "fil dilate")]
    FilDilate {
        filtration: Filtration,
        #[serde(with = "serde_rational")]
        factor: Rational,
    },
    #[serde(rename = "git lambda")]
    GitLambda { point: TensorPoint, tuple: Vec<Filtration> },
    #[serde(rename = "git mu")]
    GitMu {
        point: TensorPoint,
        tuple: Vec<Filtration>,
        bundle: LineBundle,
    },
    #[serde(rename = "git minimize")]
    GitMinimize { point: TensorPoint, seed: u64 },
    #[serde(rename = "git check")]
    GitCheck { point: TensorPoint, seed: u64 },
    #[serde(rename = "git reduce")]
    GitReduce { point: TensorPoint, seed: u64 },
    #[serde(rename = "inv detnorm")]
    InvDetnorm { d: usize },
    #[serde(rename = "inv witness")]
    InvWitness {
        point: SumPoint,
        b: Vec<i64>,
        m: u32,
        d_max: u32,
        budget: u64,
    },
    #[serde(rename = "inv bound")]
    InvBound { lattices: Vec<Lattice>, b: Vec<i64>, m: i64 },
    #[serde(rename = "verify")]
    Verify { check: Check, config: TrialConfig },
}

/// The value of a request, plus a counterexample when the mathematics
/// contradicts an expected statement.
#[derive(Debug)]
pub struct Outcome {
    pub result: Value,
    pub counterexample: Option<Value>,
}

impl Outcome {
    fn ok(result: Value) -> Self {
        Outcome {
            result,
            counterexample: None,
        }
    }
}

/// An exact value with its decimal rendering.
pub fn log_json(v: &LogValue) -> Value {
    json!({ "exact": v, "decimal": v.decimal(DECIMAL_BITS) })
}

fn alg_json(v: &AlgValue) -> Value {
    json!({ "exact": v, "decimal": format!("{:.12}", v.to_f64()) })
}

fn vector_json<T: ToString>(v: &[T]) -> Value {
    Value::from(v.iter().map(ToString::to_string).collect::<Vec<_>>())
}

fn to_value<T: Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Internal(format!("serialization: {e}")))
}

fn lattice_json(l: &Lattice) -> Result<Value> {
    Ok(json!({ "lattice": to_value(l)?, "degree": log_json(&l.degree()) }))
}

fn fold(lattices: &[Lattice], op: fn(&Lattice, &Lattice) -> Lattice) -> Result<Lattice> {
    let (first, rest) = lattices
        .split_first()
        .ok_or_else(|| Error::InvalidInput("at least one lattice is required".into()))?;
    Ok(rest.iter().fold(first.clone(), |acc, l| op(&acc, l)))
}

fn kempf(seed: u64) -> KempfOptions {
    KempfOptions {
        seed,
        ..KempfOptions::default()
    }
}

impl Request {
    pub fn name(&self) -> &'static str {
        match self {
            Request::LatInfo { .. } => "lat info",
            Request::LatDual { .. } => "lat dual",
            Request::LatSum { .. } => "lat sum",
            Request::LatTensor { .. } => "lat tensor",
            Request::LatExt { .. } => "lat ext",
            Request::LatHn { .. } => "lat hn",
            Request::LatMumax { .. } => "lat mumax",
            Request::LatUdeg { .. } => "lat udeg",
            Request::FilEval { .. } => "fil eval",
            Request::FilTensor { .. } => "fil tensor",
            Request::FilScalar { .. } => "fil scalar",
            Request::FilDilate { .. } => "fil dilate",
            Request::GitLambda { .. } => "git lambda",
            Request::GitMu { .. } => "git mu",
            Request::GitMinimize { .. } => "git minimize",
            Request::GitCheck { .. } => "git check",
            Request::GitReduce { .. } => "git reduce",
            Request::InvDetnorm { .. } => "inv detnorm",
            Request::InvWitness { .. } => "inv witness",
            Request::InvBound { .. } => "inv bound",
            Request::Verify { .. } => "verify",
        }
    }

    pub fn execute(&self) -> Result<Outcome> {
        let result = match self {
            Request::LatInfo { lattice: l } => json!({
                "rank": l.rank(),
                "determinant": format_rational(&l.determinant()),
                "degree": log_json(&l.degree()),
                "slope": log_json(&l.slope()?),
            }),
            Request::LatDual { lattice } => lattice_json(&lattice.dual())?,
            Request::LatSum { lattices } => lattice_json(&fold(lattices, Lattice::direct_sum)?)?,
            Request::LatTensor { lattices } => lattice_json(&fold(lattices, Lattice::tensor)?)?,
            Request::LatExt { lattice, k } => lattice_json(&lattice.exterior_power(*k)?)?,
            Request::LatHn { lattice } => {
                let hn = hn_filtration(lattice)?;
                json!({
                    "semistable": hn.is_semistable(),
                    "filtration": to_value(&hn)?,
                    "slopes": hn.slopes.iter().map(log_json).collect::<Vec<_>>(),
                })
            }
            Request::LatMumax { lattice } => {
                let (mu, witness) = mu_max(lattice)?;
                json!({
                    "mu_max": log_json(&mu),
                    "witness_rank": witness.rank(),
                    "witness": to_value(&witness)?,
                })
            }
            Request::LatUdeg { lattice } => {
                let (u, v) = udeg_max(lattice)?;
                json!({
                    "udeg": log_json(&u),
                    "vector": vector_json(&v),
                    "norm_sq": format_rational(&lattice.norm_sq(&v)),
                })
            }
            Request::FilEval { filtration: f, vector } => json!({
                "lambda": f.lambda_of(vector)?.to_string(),
                "expectation": format_rational(&f.expectation()),
            }),
            Request::FilTensor { filtrations } => {
                let t = Filtration::tensor(filtrations)?;
                json!({
                    "filtration": to_value(&t)?,
                    "expectation": format_rational(&t.expectation()),
                })
            }
            Request::FilScalar { left, right } => json!({
                "scalar_product": format_rational(&scalar_product(left, right)?),
                "norm_sq": [format_rational(&left.norm_sq()), format_rational(&right.norm_sq())],
            }),
            Request::FilDilate { filtration, factor } => {
                let d = filtration.dilate(factor)?;
                json!({
                    "filtration": to_value(&d)?,
                    "expectation": format_rational(&d.expectation()),
                })
            }
            Request::GitLambda { point, tuple } => json!({
                "tensor_lambda": format_rational(&tensor_lambda(point, tuple)?),
                "big_lambda": alg_json(&big_lambda(point, tuple)?),
            }),
            Request::GitMu { point, tuple, bundle } => json!({
                "mu": mu_invariant(point, tuple, bundle)?.to_string(),
            }),
            Request::GitMinimize { point, seed } => match kempf_minimize(point, &kempf(*seed))? {
                Some(r) => json!({ "verdict": "unstable", "minimizer": to_value(&r)?, "c": alg_json(&r.c) }),
                None => json!({ "verdict": "semistable" }),
            },
            Request::GitCheck { point, seed } => return git_check(point, *seed),
            Request::GitReduce { point, seed } => return git_reduce(point, *seed),
            Request::InvDetnorm { d } => {
                let t = det_tensor(*d)?;
                json!({ "tensor": to_value(&t.tensor)?, "norm": log_json(&t.norm) })
            }
            Request::InvWitness {
                point,
                b,
                m,
                d_max,
                budget,
            } => to_value(&invariant_witness_search(point, b, *m, *d_max, *budget)?)?,
            Request::InvBound { lattices, b, m } => {
                let mus = lattices
                    .iter()
                    .map(|l| Ok((l.slope()?, l.rank())))
                    .collect::<Result<Vec<_>>>()?;
                json!({
                    "slopes": mus.iter().map(|(s, _)| log_json(s)).collect::<Vec<_>>(),
                    "bound": log_json(&semistable_degree_bound(&mus, b, *m)?),
                    "sharp_bound": log_json(&sharp_degree_bound(&mus, b, *m)?),
                })
            }
            Request::Verify { check, config } => {
                let report = check.run(config)?;
                let counterexample = (report.failed > 0).then(|| {
                    json!({
                        "check": report.check,
                        "config": report.config,
                        "failures": report.failures().collect::<Vec<_>>(),
                    })
                });
                return Ok(Outcome {
                    result: to_value(&report)?,
                    counterexample,
                });
            }
        };
        Ok(Outcome::ok(result))
    }
}

/// Stability verdict; a reported destabilizer must give `Λ_x = c < 0`.
fn git_check(point: &TensorPoint, seed: u64) -> Result<Outcome> {
    let verdict = is_semistable_with(point, &kempf(seed))?;
    let mut counterexample = None;
    let mut result = to_value(&verdict)?;
    if let Stability::Unstable { destabilizer } = &verdict {
        let value = big_lambda(point, &destabilizer.minimizer)?;
        if !value.is_negative() || value != destabilizer.c {
            counterexample = Some(json!({
                "point": to_value(point)?,
                "destabilizer": to_value(destabilizer)?,
                "recomputed_big_lambda": alg_json(&value),
            }));
        }
        result["big_lambda"] = alg_json(&value);
    }
    Ok(Outcome { result, counterexample })
}

/// Reduction of an unstable point; the reduced point must satisfy the
/// twist constraints and be semistable.
fn git_reduce(point: &TensorPoint, seed: u64) -> Result<Outcome> {
    let Stability::Unstable { destabilizer } = is_semistable_with(point, &kempf(seed))? else {
        return Err(Error::PreconditionViolated("the point is semistable; nothing to reduce".into()));
    };
    let reduced = rr_reduce_with(point, &destabilizer, REDUCE_SAMPLES, seed)?;
    let check = reduced.is_semistable()?;
    let mut violations = Vec::new();
    for (i, blocks) in reduced.blocks.iter().enumerate() {
        if blocks.iter().map(|b| b.a * b.rank as i64).sum::<i64>() != 0 {
            violations.push(format!("factor {}: weighted twists do not sum to zero", i + 1));
        }
        if blocks.iter().any(|b| b.b < 0) {
            violations.push(format!("factor {}: negative b", i + 1));
        }
    }
    if !check.semistable {
        violations.push("reduced point is unstable".into());
    }
    let result = json!({ "reduction": to_value(&reduced)?, "reduced_check": to_value(&check)? });
    let counterexample = (!violations.is_empty()).then(|| {
        json!({ "point": point, "violations": violations, "reduction": result["reduction"] })
    });
    Ok(Outcome { result, counterexample })
}

#[cfg(test)]
mod tests {
    use super::*;
    use slope_lab::exactnum::rat;

    #[test]
    fn identity_lattice_is_flat() {
        let out = Request::LatInfo {
            lattice: Lattice::identity(2),
        }
        .execute()
        .unwrap();
        assert_eq!(out.result["degree"]["exact"], json!({}));
        assert_eq!(out.result["slope"]["decimal"], "0.0000000000");
    }

    #[test]
    fn requests_round_trip() {
        let req = Request::FilDilate {
            filtration: Filtration::constant(2, rat(1)),
            factor: rat(3),
        };
        let s = serde_json::to_string(&req).unwrap();
        assert!(s.starts_with(r#"{"command":"fil dilate""#));
        assert_eq!(serde_json::from_str::<Request>(&s).unwrap(), req);
    }

    #[test]
    fn pure_tensor_reduces() {
        let x = TensorPoint::basis_vector(vec![2, 2], vec![0, 0]).unwrap();
        let out = Request::GitReduce { point: x, seed: 0 }.execute().unwrap();
        assert!(out.counterexample.is_none());
        assert_eq!(out.result["reduced_check"]["semistable"], true);
    }
}
