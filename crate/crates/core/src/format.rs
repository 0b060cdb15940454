//! JSON codecs: diagram files, weight and twist vectors, and the output
//! documents of the command-line tool.
//!
//! Scalars are read either as coefficient vectors over the declared basis
//! (`["1", "1/2"]` is `1 + sqrt2/2` over `(1, sqrt2)`) or as expression
//! strings such as `"1 + 1/2*sqrt2"`. They are written as both, plus a
//! decimal approximation.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagram::{Crossing, DiagramError, Marker, Segment, Switch, TrainTrackDiagram};
use crate::homology::{AffineTwistSpace, Verification};
use crate::scalar::{
    parse_rational, BasisElement, Rational, Scalar, ScalarContext, ScalarError, DEFAULT_PRECISION,
};
use crate::seifert::SeifertResult;
use crate::weights::{WeightCone, WeightVector};

pub const FORMAT_VERSION: u32 = 1;

/// Digits after the point in rendered decimals.
pub const DECIMAL_DIGITS: u32 = 20;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown segment `{0}`")]
    UnknownSegment(String),
    #[error("no value given for segment `{0}`")]
    MissingSegment(String),
    #[error("index error: expected {expected} entries, got {got}")]
    Index { expected: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BasisEntry {
    name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    square: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    decimal: Option<String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DiagramIn {
    #[serde(rename = "ttd-version")]
    version: u32,
    #[serde(default)]
    basis: Option<Vec<BasisEntry>>,
    #[serde(default)]
    switches: Vec<Switch>,
    #[serde(default)]
    segments: Vec<Segment>,
    #[serde(default)]
    markers: Vec<Marker>,
    #[serde(default)]
    crossings: Vec<Crossing>,
}

#[derive(Serialize)]
struct DiagramOut<'a> {
    #[serde(rename = "ttd-version")]
    version: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    basis: Option<Vec<BasisEntry>>,
    switches: &'a [Switch],
    segments: &'a [Segment],
    markers: &'a [Marker],
    crossings: &'a [Crossing],
}

/// A parsed diagram file: the diagram and its scalar basis, if declared.
#[derive(Debug, Clone)]
pub struct DiagramFile {
    pub diagram: TrainTrackDiagram,
    pub basis: Option<Vec<BasisElement>>,
}

fn basis_from_entries(entries: &[BasisEntry]) -> Result<Vec<BasisElement>, FormatError> {
    entries
        .iter()
        .map(|e| {
            let mut b = BasisElement::named(&e.name);
            if let Some(sq) = &e.square {
                b.square = Some(parse_rational(sq).ok_or_else(|| ScalarError::Parse(sq.clone()))?);
            }
            b.decimal = e.decimal.clone();
            Ok(b)
        })
        .collect()
}

fn basis_to_entries(basis: &[BasisElement]) -> Vec<BasisEntry> {
    basis
        .iter()
        .map(|b| {
            // squares implied by the name are not repeated
            let implied = BasisElement::named(&b.name).square;
            BasisEntry {
                name: b.name.clone(),
                square: b
                    .square
                    .as_ref()
                    .filter(|_| b.square != implied)
                    .map(|q| q.to_string()),
                decimal: b.decimal.clone(),
            }
        })
        .collect()
}

/// Builds a context from an optional declared basis.
pub fn context(
    basis: Option<&[BasisElement]>,
    precision: u32,
) -> Result<ScalarContext, ScalarError> {
    match basis {
        Some(b) => ScalarContext::new(b.to_vec(), precision),
        None => ScalarContext::rational().with_precision(precision),
    }
}

/// Parses and validates a diagram file. The result is canonicalized.
pub fn parse_diagram(text: &str) -> Result<DiagramFile, FormatError> {
    let raw: DiagramIn =
        serde_json::from_str(text).map_err(|e| DiagramError::Syntax(e.to_string()))?;
    if raw.version != FORMAT_VERSION {
        return Err(
            DiagramError::Syntax(format!("unsupported ttd-version {}", raw.version)).into(),
        );
    }
    let basis = raw.basis.as_deref().map(basis_from_entries).transpose()?;
    if let Some(b) = &basis {
        ScalarContext::new(b.clone(), DEFAULT_PRECISION)?;
    }
    let mut diagram = TrainTrackDiagram {
        switches: raw.switches,
        segments: raw.segments,
        markers: raw.markers,
        crossings: raw.crossings,
    };
    diagram.canonicalize();
    let violations = diagram.validate();
    if !violations.is_empty() {
        return Err(DiagramError::Structure(violations).into());
    }
    Ok(DiagramFile { diagram, basis })
}

/// Serializes in canonical order; the output re-parses to the same diagram.
pub fn write_diagram(d: &TrainTrackDiagram, basis: Option<&[BasisElement]>) -> String {
    let mut d = d.clone();
    d.canonicalize();
    let out = DiagramOut {
        version: FORMAT_VERSION,
        basis: basis.map(basis_to_entries),
        switches: &d.switches,
        segments: &d.segments,
        markers: &d.markers,
        crossings: &d.crossings,
    };
    let mut s = serde_json::to_string_pretty(&out).expect("serializable");
    s.push('\n');
    s
}

fn scalar_from_json(v: &Value, ctx: &ScalarContext) -> Result<Scalar, FormatError> {
    let rational = |v: &Value| -> Result<Rational, FormatError> {
        let text = match v {
            Value::String(s) => s.clone(),
            Value::Number(n) => n.to_string(),
            _ => return Err(FormatError::Syntax(format!("expected a rational, got {v}"))),
        };
        parse_rational(&text).ok_or(FormatError::Scalar(ScalarError::Parse(text)))
    };
    match v {
        Value::Array(coeffs) => {
            if coeffs.len() > ctx.dim() {
                return Err(ScalarError::Dimension {
                    got: coeffs.len(),
                    dim: ctx.dim(),
                }
                .into());
            }
            let coeffs = coeffs.iter().map(rational).collect::<Result<Vec<_>, _>>()?;
            Ok(Scalar::from_coeffs(coeffs))
        }
        Value::String(s) => Ok(ctx.parse(s)?),
        Value::Number(_) => Ok(Scalar::from_rational(rational(v)?)),
        _ => Err(FormatError::Syntax(format!("expected a scalar, got {v}"))),
    }
}

/// Reads a per-segment vector given as an array in canonical segment order
/// or as an object keyed by segment id.
pub fn vector_from_json(
    v: &Value,
    d: &TrainTrackDiagram,
    ctx: &ScalarContext,
) -> Result<Vec<Scalar>, FormatError> {
    match v {
        Value::Array(items) => {
            if items.len() != d.segments.len() {
                return Err(FormatError::Index {
                    expected: d.segments.len(),
                    got: items.len(),
                });
            }
            items.iter().map(|x| scalar_from_json(x, ctx)).collect()
        }
        Value::Object(map) => {
            if let Some(k) = map.keys().find(|k| d.segment_index(k).is_none()) {
                return Err(FormatError::UnknownSegment(k.clone()));
            }
            d.segments
                .iter()
                .map(|s| {
                    let x = map
                        .get(&s.id)
                        .ok_or_else(|| FormatError::MissingSegment(s.id.clone()))?;
                    scalar_from_json(x, ctx)
                })
                .collect()
        }
        _ => Err(FormatError::Syntax(
            "expected an array or an object of scalars".into(),
        )),
    }
}

/// A vector file `{"basis": [...], "<key>": ...}`, with `basis` optional.
pub struct VectorFile {
    pub basis: Option<Vec<BasisElement>>,
    pub value: Value,
}

pub fn parse_vector_file(text: &str, key: &str) -> Result<VectorFile, FormatError> {
    let v: Value = serde_json::from_str(text).map_err(|e| FormatError::Syntax(e.to_string()))?;
    let Value::Object(mut map) = v else {
        return Err(FormatError::Syntax("expected an object".into()));
    };
    let basis = match map.remove("basis") {
        Some(b) => {
            let entries: Vec<BasisEntry> =
                serde_json::from_value(b).map_err(|e| FormatError::Syntax(e.to_string()))?;
            Some(basis_from_entries(&entries)?)
        }
        None => None,
    };
    let value = map
        .remove(key)
        .ok_or_else(|| FormatError::Syntax(format!("missing `{key}`")))?;
    if let Some(k) = map.keys().next() {
        return Err(FormatError::Syntax(format!("unknown field `{k}`")));
    }
    Ok(VectorFile { basis, value })
}

/// Inline vectors: a JSON array or object, or a comma-separated list of
/// expressions, optionally `id=expr`.
pub fn parse_inline_vector(text: &str) -> Result<Value, FormatError> {
    let t = text.trim();
    if t.starts_with('[') || t.starts_with('{') {
        return serde_json::from_str(t).map_err(|e| FormatError::Syntax(e.to_string()));
    }
    let parts: Vec<&str> = t.split(',').map(str::trim).collect();
    if parts.iter().all(|p| p.contains('=')) {
        let map = parts
            .iter()
            .map(|p| {
                let (k, v) = p.split_once('=').expect("checked");
                (k.trim().to_string(), Value::String(v.trim().to_string()))
            })
            .collect();
        Ok(Value::Object(map))
    } else if parts.iter().any(|p| p.contains('=')) {
        Err(FormatError::Syntax(
            "mix of keyed and positional entries".into(),
        ))
    } else {
        Ok(Value::Array(
            parts.iter().map(|p| Value::String(p.to_string())).collect(),
        ))
    }
}

// ---- output documents ----

/// Exact value with a decimal approximation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScalarOut {
    pub exact: String,
    pub coeffs: Vec<String>,
    pub decimal: String,
}

pub fn scalar_out(ctx: &ScalarContext, s: &Scalar) -> ScalarOut {
    ScalarOut {
        exact: ctx.format(s),
        coeffs: (0..ctx.dim()).map(|i| s.coeff(i).to_string()).collect(),
        decimal: ctx.to_decimal(s, DECIMAL_DIGITS),
    }
}

fn scalars_out(ctx: &ScalarContext, v: &[Scalar]) -> Vec<ScalarOut> {
    v.iter().map(|s| scalar_out(ctx, s)).collect()
}

fn rationals(v: &[Rational]) -> Vec<String> {
    v.iter().map(|q| q.to_string()).collect()
}

#[derive(Debug, Serialize)]
pub struct ConeDoc {
    pub segments: Vec<String>,
    pub dimension: usize,
    pub basis: Vec<Vec<String>>,
    pub sample_positive: Option<Vec<String>>,
}

pub fn cone_doc(d: &TrainTrackDiagram, cone: &WeightCone) -> ConeDoc {
    ConeDoc {
        segments: d.segments.iter().map(|s| s.id.clone()).collect(),
        dimension: cone.dimension,
        basis: cone.basis.iter().map(|b| rationals(b)).collect(),
        sample_positive: cone.sample_positive.as_deref().map(rationals),
    }
}

#[derive(Debug, Serialize)]
pub struct FramedLinkOut {
    pub segments: Vec<String>,
    pub weights: Vec<ScalarOut>,
    pub twists: Vec<ScalarOut>,
}

#[derive(Debug, Serialize)]
pub struct FamilyOut {
    pub width: ScalarOut,
    pub itinerary: Vec<String>,
}

#[derive(Debug, Serialize)]
pub struct CapOut {
    pub family: usize,
    pub weight: ScalarOut,
}

#[derive(Debug, Serialize)]
pub struct CutOut {
    pub segment: String,
    pub position: ScalarOut,
}

#[derive(Debug, Serialize)]
pub struct PinchOut {
    pub merge: String,
    pub split: String,
    pub joins: [usize; 2],
    pub path: Vec<CutOut>,
}

#[derive(Debug, Serialize)]
pub struct ReconstructionOut {
    pub crossing: String,
    pub over: String,
    pub under: String,
    pub sign: i8,
    pub twist: ScalarOut,
    pub band_weight: ScalarOut,
}

#[derive(Debug, Serialize)]
pub struct LaminationOut {
    pub families: Vec<FamilyOut>,
    pub caps: Vec<CapOut>,
    pub pinches: Vec<PinchOut>,
    pub reconstructions: Vec<ReconstructionOut>,
    pub sector_weights: Vec<ScalarOut>,
    pub complex_chi: i64,
}

#[derive(Debug, Serialize)]
pub struct SurfaceOut {
    pub chi: ScalarOut,
    pub boundary_components: usize,
    pub genus: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct SeifertDoc {
    pub framed_link: FramedLinkOut,
    pub lamination: LaminationOut,
    /// Present only for integral weights and twists.
    pub surface: Option<SurfaceOut>,
    pub verified: bool,
}

pub fn seifert_doc(
    d: &TrainTrackDiagram,
    ctx: &ScalarContext,
    r: &SeifertResult,
    verification: &Verification,
) -> SeifertDoc {
    let l = &r.lamination;
    let fw = &l.freeway.track;
    let fseg = |i: usize| fw.segments[i].id.clone();
    let od = &l.freeway.original;
    let surface = r.components.map(|b| SurfaceOut {
        chi: scalar_out(ctx, &r.euler_characteristic),
        boundary_components: b,
        genus: r.genus.as_ref().map(|g| g.to_string()),
    });
    SeifertDoc {
        framed_link: FramedLinkOut {
            segments: d.segments.iter().map(|s| s.id.clone()).collect(),
            weights: scalars_out(ctx, &r.framed_link.weights),
            twists: scalars_out(ctx, &r.framed_link.twists),
        },
        lamination: LaminationOut {
            families: l
                .families
                .iter()
                .map(|f| FamilyOut {
                    width: scalar_out(ctx, &f.width),
                    itinerary: f.itinerary.iter().map(|&e| fseg(e)).collect(),
                })
                .collect(),
            caps: l
                .caps
                .iter()
                .map(|c| CapOut {
                    family: c.family,
                    weight: scalar_out(ctx, &c.weight),
                })
                .collect(),
            pinches: l
                .pinches
                .iter()
                .map(|p| {
                    let t = &l.trace[p.split];
                    PinchOut {
                        merge: fw.switches[t.merge].id.clone(),
                        split: fw.switches[t.split].id.clone(),
                        joins: p.joins,
                        path: t
                            .path
                            .iter()
                            .map(|(e, x)| CutOut {
                                segment: fseg(*e),
                                position: scalar_out(ctx, x),
                            })
                            .collect(),
                    }
                })
                .collect(),
            reconstructions: l
                .reconstructions
                .iter()
                .map(|c| ReconstructionOut {
                    crossing: c.crossing.clone(),
                    over: od.segments[c.over].id.clone(),
                    under: od.segments[c.under].id.clone(),
                    sign: c.sign,
                    twist: scalar_out(ctx, &c.twist),
                    band_weight: scalar_out(ctx, &c.band_weight),
                })
                .collect(),
            sector_weights: scalars_out(ctx, &l.sector_weights),
            complex_chi: r.complex_euler_characteristic,
        },
        surface,
        verified: verification.valid,
    }
}

#[derive(Debug, Serialize)]
pub struct TwistSpaceDoc {
    pub segments: Vec<String>,
    pub particular: Vec<ScalarOut>,
    pub directions: Vec<Vec<String>>,
    pub dimension: usize,
    /// Segments on no cycle; their twists are unconstrained.
    pub free_segments: Vec<String>,
}

pub fn twistspace_doc(
    d: &TrainTrackDiagram,
    ctx: &ScalarContext,
    s: &AffineTwistSpace,
) -> TwistSpaceDoc {
    TwistSpaceDoc {
        segments: d.segments.iter().map(|s| s.id.clone()).collect(),
        particular: scalars_out(ctx, &s.particular),
        directions: s.directions.iter().map(|u| rationals(u)).collect(),
        dimension: s.dimension,
        free_segments: s
            .free_segments
            .iter()
            .map(|&i| d.segments[i].id.clone())
            .collect(),
    }
}

#[derive(Debug, Serialize)]
pub struct VerifyDoc {
    pub valid: bool,
    pub residual: Vec<ScalarOut>,
}

pub fn verify_doc(ctx: &ScalarContext, v: &Verification) -> VerifyDoc {
    VerifyDoc {
        valid: v.valid,
        residual: scalars_out(ctx, &v.residual),
    }
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("serializable");
    s.push('\n');
    s
}

/// Parses a weight vector for `d`.
pub fn weights_from(
    value: &Value,
    d: &TrainTrackDiagram,
    ctx: &ScalarContext,
) -> Result<WeightVector, FormatError> {
    Ok(WeightVector::new(vector_from_json(value, d, ctx)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    const THETA: &str = r#"{
        "ttd-version": 1,
        "basis": [{"name": "1"}, {"name": "sqrt2", "decimal": "1.41421356237309504880"}],
        "switches": [{"id": "B", "mode": "split"}, {"id": "A", "mode": "merge"}],
        "segments": [
            {"id": "s_x", "from": {"switch": "B", "slot": "left"}, "to": {"switch": "A", "slot": "left"}},
            {"id": "s_mid", "from": {"switch": "A", "slot": "trunk"}, "to": {"switch": "B", "slot": "trunk"}},
            {"id": "s_y", "from": {"switch": "B", "slot": "right"}, "to": {"switch": "A", "slot": "right"}}
        ],
        "markers": [],
        "crossings": []
    }"#;

    #[test]
    fn theta_round_trips() {
        let f = parse_diagram(THETA).unwrap();
        assert_eq!(f.diagram.segment_ids(), vec!["s_mid", "s_x", "s_y"]);
        let text = write_diagram(&f.diagram, f.basis.as_deref());
        let g = parse_diagram(&text).unwrap();
        assert_eq!(f.diagram, g.diagram);
        assert_eq!(f.basis, g.basis);
        assert_eq!(text, write_diagram(&g.diagram, g.basis.as_deref()));
    }

    #[test]
    fn version_is_required() {
        let text = THETA.replace("\"ttd-version\": 1,", "");
        assert!(matches!(
            parse_diagram(&text),
            Err(FormatError::Diagram(DiagramError::Syntax(_)))
        ));
        let text = THETA.replace("\"ttd-version\": 1", "\"ttd-version\": 2");
        assert!(matches!(
            parse_diagram(&text),
            Err(FormatError::Diagram(DiagramError::Syntax(_)))
        ));
    }

    #[test]
    fn structure_errors_name_the_invariant() {
        let text = THETA.replace(r#""slot": "right"}, "to""#, r#""slot": "left"}, "to""#);
        match parse_diagram(&text) {
            Err(FormatError::Diagram(DiagramError::Structure(v))) => {
                assert!(
                    v.iter().any(|x| x.invariant() == "switch slot structure"),
                    "{v:?}"
                );
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn vectors_keyed_positional_and_inline() {
        let f = parse_diagram(THETA).unwrap();
        let ctx = context(f.basis.as_deref(), DEFAULT_PRECISION).unwrap();
        let keyed = serde_json::json!({"s_x": [1], "s_mid": ["1", "1"], "s_y": "sqrt2"});
        let a = vector_from_json(&keyed, &f.diagram, &ctx).unwrap();
        let b = vector_from_json(
            &parse_inline_vector("1+sqrt2, 1, sqrt2").unwrap(),
            &f.diagram,
            &ctx,
        )
        .unwrap();
        let c = vector_from_json(
            &parse_inline_vector("s_y=sqrt2, s_mid=1+sqrt2, s_x=1").unwrap(),
            &f.diagram,
            &ctx,
        )
        .unwrap();
        assert_eq!(a, b);
        assert_eq!(a, c);
        let bad = serde_json::json!({"s_x": 1, "s_mid": 2, "s_z": 1});
        assert!(matches!(
            vector_from_json(&bad, &f.diagram, &ctx),
            Err(FormatError::UnknownSegment(s)) if s == "s_z"
        ));
        assert!(matches!(
            vector_from_json(&serde_json::json!([1, 2]), &f.diagram, &ctx),
            Err(FormatError::Index {
                expected: 3,
                got: 2
            })
        ));
    }

    #[test]
    fn vector_file_with_basis() {
        let v = parse_vector_file(
            r#"{"basis": [{"name": "1"}, {"name": "sqrt3"}], "weights": [[0, 1]]}"#,
            "weights",
        )
        .unwrap();
        let basis = v.basis.unwrap();
        assert_eq!(basis[1].square, Some(Rational::from_integer(3.into())));
        assert!(parse_vector_file(r#"{"weights": [], "extra": 1}"#, "weights").is_err());
    }

    #[test]
    fn scalar_rendering_has_exact_and_decimal() {
        let ctx = ScalarContext::quadratic(2);
        let s = ctx.parse("1+sqrt2").unwrap();
        let out = scalar_out(&ctx, &s);
        assert_eq!(out.coeffs, vec!["1", "1"]);
        assert!(
            out.decimal.starts_with("2.41421356237309504880"),
            "{}",
            out.decimal
        );
    }
}
