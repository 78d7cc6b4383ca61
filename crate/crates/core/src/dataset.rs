//! Curve-pair records: JSON Lines ingestion, validation and the bundled data.
//!
//! One record per line:
//!
//! ```text
//! {"label":"69.a","curves":[{"label":"69.a2","ainvs":[1,0,1,-1,-1]},...],
//!  "ell":2,"conductor":69,"profile":{...},"expected":{"density":"7/15",...}}
//! ```
//!
//! The first curve is E, the second E'. Coefficients may be JSON integers or
//! decimal strings (for values beyond 64 bits). A file whose content starts
//! with `[` is read as a single JSON array instead.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::curve::{CurveError, RationalCurve, RationalCurvePair, CM_DISCRIMINANTS};
use crate::density::{
    eval_density, format_rational, maximal_profile, rational, validate_profile, DensityProfile,
    ExactRational, LevelEntry, Tail,
};

/// The dataset shipped with the crate.
pub const BUNDLED: &str = include_str!("../../../data/pairs.jsonl");

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("record {label} (line {line}): {message}")]
    Invalid {
        label: String,
        line: usize,
        message: String,
    },
    #[error("duplicate label {label} on lines {first} and {line}")]
    Duplicate {
        label: String,
        first: usize,
        line: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveEntry {
    pub label: String,
    #[serde(with = "ainvs_serde")]
    pub ainvs: [BigInt; 5],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm_disc: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedSweep {
    #[serde(rename = "X")]
    pub x: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub iso_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<f64>,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_rational")]
    pub density: Option<ExactRational>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub density_source: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sweeps: Vec<ExpectedSweep>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PairRecord {
    pub label: String,
    pub curves: Vec<CurveEntry>,
    pub ell: u64,
    pub conductor: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cm_disc: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<DensityProfile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected: Option<Expected>,
    /// Opaque labels (e.g. l-adic image labels), stored but not interpreted.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub annotations: BTreeMap<String, String>,
}

impl PairRecord {
    /// Build the curve pair, checking every record invariant.
    pub fn to_pair(&self) -> Result<RationalCurvePair, String> {
        if self.curves.len() != 2 {
            return Err(format!("expected 2 curves, found {}", self.curves.len()));
        }
        if let Some(d) = self.cm_disc {
            if !CM_DISCRIMINANTS.contains(&d) {
                return Err(CurveError::BadCmDiscriminant(d).to_string());
            }
        }
        let mut curves = Vec::with_capacity(2);
        for c in &self.curves {
            let curve = RationalCurve::new(c.ainvs.clone(), self.conductor, c.label.clone(), c.cm_disc)
                .map_err(|e| format!("curve {}: {e}", c.label))?;
            let rest = curve.discriminant_outside_conductor();
            if !rest.is_one() {
                return Err(format!(
                    "curve {}: discriminant has primes outside the conductor {} (leftover {rest})",
                    c.label, self.conductor
                ));
            }
            curves.push(curve);
        }
        if let Some(p) = &self.profile {
            if p.ell != self.ell {
                return Err(format!("profile ell {} differs from record ell {}", p.ell, self.ell));
            }
            let violations = validate_profile(p);
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(|v| v.to_string()).collect();
                return Err(format!("profile: {}", list.join("; ")));
            }
        }
        let ep = curves.pop().expect("two curves");
        let e = curves.pop().expect("two curves");
        RationalCurvePair::new(self.label.clone(), e, ep, self.ell, self.profile.clone())
            .map_err(|e| e.to_string())
    }

    /// Exact density of the profile, if present.
    pub fn evaluated_density(&self) -> Option<ExactRational> {
        self.profile.as_ref().and_then(|p| eval_density(p).ok())
    }

    /// `(expected, evaluated)` when both exist and disagree.
    pub fn density_discrepancy(&self) -> Option<(ExactRational, ExactRational)> {
        let expected = self.expected.as_ref()?.density.clone()?;
        let evaluated = self.evaluated_density()?;
        (expected != evaluated).then_some((expected, evaluated))
    }

    /// The expected sweep entry at a given bound, if any.
    pub fn expected_sweep(&self, x: u64) -> Option<&ExpectedSweep> {
        self.expected.as_ref()?.sweeps.iter().find(|s| s.x == x)
    }
}

mod ainvs_serde {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserializer, Serializer};

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Coefficient {
        Int(i64),
        Text(String),
    }

    pub fn serialize<S: Serializer>(a: &[BigInt; 5], s: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeSeq;
        let mut seq = s.serialize_seq(Some(5))?;
        for x in a {
            match x.to_i64() {
                Some(v) => seq.serialize_element(&v)?,
                None => seq.serialize_element(&x.to_string())?,
            }
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<[BigInt; 5], D::Error> {
        let raw = Vec::<Coefficient>::deserialize(d)?;
        if raw.len() != 5 {
            return Err(D::Error::custom(format!(
                "ainvs must have 5 entries, found {}",
                raw.len()
            )));
        }
        let mut out: [BigInt; 5] = Default::default();
        for (slot, c) in out.iter_mut().zip(raw) {
            *slot = match c {
                Coefficient::Int(v) => BigInt::from(v),
                Coefficient::Text(s) => s
                    .trim()
                    .parse()
                    .map_err(|_| D::Error::custom(format!("invalid integer {s:?}")))?,
            };
        }
        Ok(out)
    }
}

mod opt_rational {
    use super::*;
    use serde::{Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Option<ExactRational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_str(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<ExactRational>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| crate::density::parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// Parse and validate records from text.
pub fn parse_pairs(text: &str) -> Result<Vec<PairRecord>, DatasetError> {
    let entries: Vec<(usize, PairRecord)> = if text.trim_start().starts_with('[') {
        let records: Vec<PairRecord> = serde_json::from_str(text).map_err(|e| DatasetError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        records.into_iter().map(|r| (1, r)).collect()
    } else {
        let mut out = Vec::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let rec: PairRecord = serde_json::from_str(line).map_err(|e| DatasetError::Parse {
                line: i + 1,
                message: e.to_string(),
            })?;
            out.push((i + 1, rec));
        }
        out
    };

    let mut seen: HashMap<String, usize> = HashMap::new();
    let mut out = Vec::with_capacity(entries.len());
    for (line, rec) in entries {
        if let Some(&first) = seen.get(&rec.label) {
            return Err(DatasetError::Duplicate {
                label: rec.label,
                first,
                line,
            });
        }
        seen.insert(rec.label.clone(), line);
        rec.to_pair().map_err(|message| DatasetError::Invalid {
            label: rec.label.clone(),
            line,
            message,
        })?;
        out.push(rec);
    }
    Ok(out)
}

/// Load and validate a JSON Lines dataset.
pub fn load_pairs(path: impl AsRef<Path>) -> Result<Vec<PairRecord>, DatasetError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_pairs(&text)
}

/// The bundled records.
pub fn bundled() -> Vec<PairRecord> {
    parse_pairs(BUNDLED).expect("bundled dataset is valid")
}

/// One JSON object per line.
pub fn to_jsonl(records: &[PairRecord]) -> String {
    let mut s = String::new();
    for r in records {
        s.push_str(&serde_json::to_string(r).expect("records serialize"));
        s.push('\n');
    }
    s
}

/// A density profile together with a note on where its data comes from.
#[derive(Clone, Debug, PartialEq)]
pub struct TaggedProfile {
    pub profile: DensityProfile,
    pub source: &'static str,
}

fn entry(m: u32, size_g: u64, size_gp: u64, d: (i64, i64), dp: (i64, i64)) -> LevelEntry {
    LevelEntry {
        m,
        size_g,
        size_gp,
        d: rational(d.0, d.1),
        dp: rational(dp.0, dp.1),
    }
}

fn tail(level: u32, size_g: u64, size_gp: u64, d: (i64, i64), dp: (i64, i64), g: u32) -> Tail {
    Tail {
        level,
        size_g,
        size_gp,
        d: rational(d.0, d.1),
        dp: rational(dp.0, dp.1),
        g,
    }
}

/// Profiles of the bundled pairs, written out independently of the data file.
pub fn builtin_profiles() -> BTreeMap<&'static str, TaggedProfile> {
    let mut m = BTreeMap::new();
    let maximal = "maximal l-adic images: |G(l^m)| = (l-1) l^(4m-3), d = d' = 1 - 1/l";
    for (label, ell) in [("69.a", 2), ("44.a", 3), ("38.b", 5), ("26.b", 7)] {
        m.insert(
            label,
            TaggedProfile {
                profile: maximal_profile(ell),
                source: maximal,
            },
        );
    }
    m.insert(
        "121.a",
        TaggedProfile {
            profile: DensityProfile {
                ell: 11,
                head: vec![],
                tail: tail(1, 120, 120, (10, 11), (10, 11), 4),
            },
            source: "level 11 with |G(11)| = |G'(11)| = 120 and d = d' = 10/11",
        },
    );
    m.insert(
        "144.b",
        TaggedProfile {
            profile: DensityProfile {
                ell: 2,
                head: vec![entry(1, 1, 1, (0, 1), (0, 1)), entry(2, 4, 8, (1, 2), (0, 1))],
                tail: tail(3, 16, 16, (1, 2), (1, 2), 4),
            },
            source: "level 8: |G(4)| = 4, |G'(4)| = 8, |G(8)| = |G'(8)| = 16; d_2 = d'_2 = 0, d_4 = 1/2, d'_4 = 0",
        },
    );
    m.insert(
        "49.a",
        TaggedProfile {
            profile: DensityProfile {
                ell: 2,
                head: vec![entry(1, 2, 2, (1, 2), (1, 2))],
                tail: tail(2, 8, 8, (1, 2), (0, 1), 2),
            },
            source: "CM: |G(2^m)| = |G'(2^m)| = 2 * 4^(m-1); d_2 = d'_2 = 1/2, then d = 1/2, d' = 0",
        },
    );
    m.insert(
        "432.e",
        TaggedProfile {
            profile: DensityProfile {
                ell: 3,
                head: vec![],
                tail: tail(1, 4, 12, (2, 3), (0, 1), 2),
            },
            source: "CM: |G(3^m)| = 4 * 9^(m-1), d = 2/3, d' = 0 at every level",
        },
    );
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_inputs() {
        assert!(parse_pairs("").unwrap().is_empty());
        assert!(parse_pairs("[]").unwrap().is_empty());
        assert!(parse_pairs("\n\n").unwrap().is_empty());
    }

    #[test]
    fn bundled_dataset() {
        let records = bundled();
        let labels: Vec<&str> = records.iter().map(|r| r.label.as_str()).collect();
        for l in ["69.a", "44.a", "38.b", "26.b", "121.a", "144.b", "49.a", "432.e"] {
            assert!(labels.contains(&l), "{l} missing");
        }
        let builtin = builtin_profiles();
        for r in &records {
            let p = r.profile.as_ref().expect("bundled records carry profiles");
            assert_eq!(p, &builtin[r.label.as_str()].profile, "{}", r.label);
        }
    }

    #[test]
    fn round_trip_is_idempotent() {
        let records = bundled();
        let once = to_jsonl(&records);
        let again = to_jsonl(&parse_pairs(&once).unwrap());
        assert_eq!(once, again);
        assert_eq!(parse_pairs(&once).unwrap(), records);
    }

    #[test]
    fn big_coefficients_as_strings() {
        let line = r#"{"label":"x","curves":[{"label":"a","ainvs":[0,0,0,"-1","123456789012345678901234567890"]},{"label":"b","ainvs":[0,0,0,-1,0]}],"ell":2,"conductor":1}"#;
        let err = parse_pairs(line).unwrap_err();
        // the discriminant of such a model has primes outside conductor 1
        assert!(matches!(err, DatasetError::Invalid { .. }), "{err}");
        let rec: PairRecord = serde_json::from_str(line).unwrap();
        let s = serde_json::to_string(&rec).unwrap();
        assert!(s.contains("\"123456789012345678901234567890\""));
        assert!(s.contains("[0,0,0,-1,"));
    }

    #[test]
    fn diagnostics() {
        let good = BUNDLED.lines().next().unwrap();
        let text = format!("{good}\n{{\"label\": 3}}\n");
        match parse_pairs(&text).unwrap_err() {
            DatasetError::Parse { line, .. } => assert_eq!(line, 2),
            e => panic!("{e}"),
        }
        let text = format!("{good}\n\n{good}\n");
        match parse_pairs(&text).unwrap_err() {
            DatasetError::Duplicate { first, line, .. } => assert_eq!((first, line), (1, 3)),
            e => panic!("{e}"),
        }
        let bad_profile = good.replace("\"sizeGp\":2", "\"sizeGp\":8");
        match parse_pairs(&bad_profile).unwrap_err() {
            DatasetError::Invalid { label, message, .. } => {
                assert_eq!(label, "69.a");
                assert!(message.contains("sizeG/sizeGp"), "{message}");
            }
            e => panic!("{e}"),
        }
        let bad_ell = good.replace("\"ell\":2,\"conductor\"", "\"ell\":4,\"conductor\"");
        assert!(matches!(parse_pairs(&bad_ell), Err(DatasetError::Invalid { .. })));
        let wrong_conductor = good.replace("\"conductor\":69", "\"conductor\":23");
        assert!(matches!(parse_pairs(&wrong_conductor), Err(DatasetError::Invalid { .. })));
        let unknown = good.replacen("{", "{\"colour\":1,", 1);
        assert!(matches!(parse_pairs(&unknown), Err(DatasetError::Parse { .. })));
    }

    #[test]
    fn only_the_cm_three_isogeny_disagrees_with_its_published_density() {
        for r in bundled() {
            match r.density_discrepancy() {
                None => assert_ne!(r.label, "432.e"),
                Some((expected, evaluated)) => {
                    assert_eq!(r.label, "432.e");
                    assert_eq!(expected, rational(22, 27));
                    assert_eq!(evaluated, rational(13, 16));
                }
            }
        }
    }

    #[test]
    fn records_with_counts_match_their_profiles() {
        for r in bundled() {
            let Some(exp) = &r.expected else { continue };
            if exp.sweeps.iter().any(|s| s.iso_count.is_some()) {
                assert_eq!(r.evaluated_density(), exp.density, "{}", r.label);
            }
        }
    }

    #[test]
    fn loads_from_disk() {
        let dir = std::env::temp_dir().join(format!("isodense-dataset-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pairs.jsonl");
        std::fs::write(&path, BUNDLED).unwrap();
        assert_eq!(load_pairs(&path).unwrap().len(), bundled().len());
        assert!(matches!(load_pairs(dir.join("missing.jsonl")), Err(DatasetError::Io { .. })));
        std::fs::remove_dir_all(&dir).unwrap();
    }
}
