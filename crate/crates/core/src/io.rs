//! JSON forms of elements, map files and classification reports.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::algebra::{AlgebraKind, AlgebraSpec, BasisSymbol, Element};
use crate::error::{Error, Result};
use crate::maps::{BilinearMapWindow, LinearMapWindow, ResidualFailure, SweepReport};
use crate::scalar::{format_scalar, parse_scalar};
use crate::solver::{ClassificationReport, CoreMap, ResidualCheck};

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct SymbolJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct TermJson {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<i64>,
    pub coeff: String,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum ArgJson {
    One(SymbolJson),
    Two([SymbolJson; 2]),
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct EntryJson {
    pub arg: ArgJson,
    pub value: Vec<TermJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct MapFileJson {
    pub algebra: String,
    pub window: u32,
    pub kind: String,
    pub entries: Vec<EntryJson>,
}

pub fn symbol_to_json(s: BasisSymbol) -> SymbolJson {
    match s {
        BasisSymbol::L(n) => SymbolJson {
            family: "L".into(),
            index: Some(n),
        },
        BasisSymbol::H(n) => SymbolJson {
            family: "H".into(),
            index: Some(n),
        },
        BasisSymbol::C => SymbolJson {
            family: "c".into(),
            index: None,
        },
    }
}

pub fn symbol_from_json(family: &str, index: Option<i64>) -> Result<BasisSymbol> {
    match (family, index) {
        ("L", Some(n)) => Ok(BasisSymbol::L(n)),
        ("H", Some(n)) => Ok(BasisSymbol::H(n)),
        ("c", None) => Ok(BasisSymbol::C),
        ("c", Some(_)) => Err(Error::Parse("symbol c takes no index".into())),
        ("L" | "H", None) => Err(Error::Parse(format!("symbol family {family} needs an index"))),
        _ => Err(Error::Parse(format!("unknown symbol family {family:?}"))),
    }
}

pub fn element_to_json(x: &Element) -> Vec<TermJson> {
    x.terms()
        .map(|(s, c)| {
            let SymbolJson { family, index } = symbol_to_json(*s);
            TermJson {
                family,
                index,
                coeff: format_scalar(c),
            }
        })
        .collect()
}

pub fn element_from_json(terms: &[TermJson]) -> Result<Element> {
    let mut x = Element::zero();
    for t in terms {
        x.add_term(symbol_from_json(&t.family, t.index)?, parse_scalar(&t.coeff)?);
    }
    Ok(x)
}

pub fn element_to_string(x: &Element) -> String {
    serde_json::to_string(&element_to_json(x)).expect("element serializes")
}

pub fn element_from_str(s: &str) -> Result<Element> {
    let terms: Vec<TermJson> = serde_json::from_str(s)?;
    element_from_json(&terms)
}

/// Parsed map file.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapFile {
    Linear(LinearMapWindow),
    Bilinear(BilinearMapWindow),
}

impl MapFile {
    pub fn algebra(&self) -> AlgebraSpec {
        match self {
            MapFile::Linear(m) => m.algebra(),
            MapFile::Bilinear(m) => m.algebra(),
        }
    }

    pub fn radius(&self) -> u32 {
        match self {
            MapFile::Linear(m) => m.radius(),
            MapFile::Bilinear(m) => m.radius(),
        }
    }
}

pub fn linear_map_to_json(phi: &LinearMapWindow) -> MapFileJson {
    MapFileJson {
        algebra: phi.algebra().kind.name().into(),
        window: phi.radius(),
        kind: "linear".into(),
        entries: phi
            .values()
            .iter()
            .map(|(s, v)| EntryJson {
                arg: ArgJson::One(symbol_to_json(*s)),
                value: element_to_json(v),
            })
            .collect(),
    }
}

pub fn bilinear_map_to_json(f: &BilinearMapWindow) -> MapFileJson {
    MapFileJson {
        algebra: f.algebra().kind.name().into(),
        window: f.radius(),
        kind: "bilinear".into(),
        entries: f
            .values()
            .iter()
            .map(|((a, b), v)| EntryJson {
                arg: ArgJson::Two([symbol_to_json(*a), symbol_to_json(*b)]),
                value: element_to_json(v),
            })
            .collect(),
    }
}

pub fn map_file_to_json(m: &MapFile) -> MapFileJson {
    match m {
        MapFile::Linear(phi) => linear_map_to_json(phi),
        MapFile::Bilinear(f) => bilinear_map_to_json(f),
    }
}

fn parse_arg(a: &SymbolJson) -> Result<BasisSymbol> {
    symbol_from_json(&a.family, a.index)
}

fn check_coverage<K: Ord + Copy + std::fmt::Debug>(expected: &BTreeSet<K>, seen: &BTreeMap<K, Element>) -> Result<()> {
    if let Some(missing) = expected.iter().find(|k| !seen.contains_key(k)) {
        return Err(Error::Parse(format!("missing entry for {missing:?}")));
    }
    if let Some(extra) = seen.keys().find(|k| !expected.contains(k)) {
        return Err(Error::Parse(format!("entry {extra:?} lies outside the window")));
    }
    Ok(())
}

/// Validates a parsed map file against its algebra and window. Every window
/// argument must appear exactly once.
pub fn map_file_from_json(m: &MapFileJson) -> Result<MapFile> {
    let algebra: AlgebraSpec = AlgebraKind::from_name(&m.algebra)?.into();
    let window = m.window;
    let symbols = algebra.window_symbols(window);
    match m.kind.as_str() {
        "linear" => {
            let mut values = BTreeMap::new();
            for e in &m.entries {
                let ArgJson::One(a) = &e.arg else {
                    return Err(Error::Parse("linear map entries take a single symbol".into()));
                };
                let s = parse_arg(a)?;
                if values.insert(s, element_from_json(&e.value)?).is_some() {
                    return Err(Error::Parse(format!("duplicate entry for {s}")));
                }
            }
            check_coverage(&symbols.iter().copied().collect(), &values)?;
            Ok(MapFile::Linear(LinearMapWindow::from_table(algebra, window, values)?))
        }
        "bilinear" => {
            let mut values = BTreeMap::new();
            for e in &m.entries {
                let ArgJson::Two([a, b]) = &e.arg else {
                    return Err(Error::Parse("bilinear map entries take a pair of symbols".into()));
                };
                let key = (parse_arg(a)?, parse_arg(b)?);
                if values.insert(key, element_from_json(&e.value)?).is_some() {
                    return Err(Error::Parse(format!("duplicate entry for ({}, {})", key.0, key.1)));
                }
            }
            let expected = symbols
                .iter()
                .flat_map(|a| symbols.iter().map(move |b| (*a, *b)))
                .collect();
            check_coverage(&expected, &values)?;
            let value_radius = values
                .values()
                .map(|v| v.max_abs_degree())
                .max()
                .unwrap_or(0)
                .max(2 * window as i64);
            let value_radius =
                u32::try_from(value_radius).map_err(|_| Error::Parse("value degree out of range".into()))?;
            Ok(MapFile::Bilinear(BilinearMapWindow::from_table_with_value_radius(
                algebra,
                window,
                value_radius,
                values,
            )?))
        }
        other => Err(Error::Parse(format!("unknown map kind {other:?}"))),
    }
}

pub fn map_file_from_str(s: &str) -> Result<MapFile> {
    let m: MapFileJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
    map_file_from_json(&m)
}

pub fn map_file_to_string(m: &MapFile) -> String {
    let mut s = serde_json::to_string_pretty(&map_file_to_json(m)).expect("map serializes");
    s.push('\n');
    s
}

fn args_json(args: &[BasisSymbol]) -> Vec<SymbolJson> {
    args.iter().map(|s| symbol_to_json(*s)).collect()
}

pub fn failure_to_json(f: &ResidualFailure) -> Value {
    json!({
        "identity": f.identity,
        "args": args_json(&f.args),
        "residual": element_to_json(&f.residual),
    })
}

#[derive(Serialize)]
struct ParametersJson {
    lambda: String,
    mu: String,
}

#[derive(Serialize)]
struct StabilityJson {
    window: u32,
    dimension: Option<usize>,
    stable: bool,
}

#[derive(Serialize)]
struct ReportJson {
    algebra: &'static str,
    problem: &'static str,
    #[serde(rename = "N")]
    n: u32,
    #[serde(rename = "M")]
    m: u32,
    #[serde(rename = "K")]
    k: u32,
    raw_dimension: usize,
    core_dimension: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    quotient_dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    stability: Option<StabilityJson>,
    core_basis: Vec<MapFileJson>,
    parameters: Vec<ParametersJson>,
    residual_check: Value,
    #[serde(skip_serializing_if = "Option::is_none")]
    timings_ms: Option<BTreeMap<String, u128>>,
}

fn report_json(r: &ClassificationReport, with_timings: bool) -> ReportJson {
    ReportJson {
        algebra: r.algebra.kind.name(),
        problem: r.problem.name(),
        n: r.window,
        m: r.value_radius,
        k: r.core,
        raw_dimension: r.raw_dimension,
        core_dimension: r.core_dimension,
        quotient_dimension: r.quotient_dimension,
        stability: r.stability.as_ref().map(|s| StabilityJson {
            window: s.window,
            dimension: s.dimension,
            stable: s.stable,
        }),
        core_basis: r
            .core_basis
            .iter()
            .map(|m| match m {
                CoreMap::Linear(phi) => linear_map_to_json(phi),
                CoreMap::Bilinear(f) => bilinear_map_to_json(f),
            })
            .collect(),
        parameters: r
            .parameters
            .iter()
            .map(|(l, m)| ParametersJson {
                lambda: format_scalar(l),
                mu: format_scalar(m),
            })
            .collect(),
        residual_check: match &r.residual_check {
            ResidualCheck::Pass => json!("pass"),
            ResidualCheck::Fail { basis_index, failure } => {
                let mut f = failure_to_json(failure);
                f["basis_index"] = json!(basis_index);
                json!({ "fail": f })
            }
        },
        timings_ms: with_timings.then(|| r.timings_ms.clone()),
    }
}

/// Pretty JSON report with a trailing newline.
pub fn report_to_string(r: &ClassificationReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_json(r, true)).expect("report serializes");
    s.push('\n');
    s
}

/// Report without timings; identical inputs give identical strings.
pub fn report_to_canonical_string(r: &ClassificationReport) -> String {
    let mut s = serde_json::to_string_pretty(&report_json(r, false)).expect("report serializes");
    s.push('\n');
    s
}

/// Drops `timings_ms` from a serialized report.
pub fn strip_timings(report: &str) -> Result<String> {
    let mut v: Value = serde_json::from_str(report)?;
    if let Value::Object(m) = &mut v {
        m.remove("timings_ms");
    }
    Ok(serde_json::to_string(&v)?)
}

pub fn sweep_report_to_json(map: &MapFile, check: &str, sweep: &SweepReport, limit: usize) -> Value {
    json!({
        "algebra": map.algebra().kind.name(),
        "window": map.radius(),
        "check": check,
        "checked": sweep.checked,
        "skipped": sweep.skipped,
        "failure_count": sweep.failures.len(),
        "result": if sweep.passed() { "pass" } else { "fail" },
        "failures": sweep.failures.iter().take(limit).map(failure_to_json).collect::<Vec<_>>(),
    })
}

pub fn center_report_to_json(algebra: AlgebraSpec, radius: u32, core: u32, basis: &[Element]) -> Value {
    json!({
        "algebra": algebra.kind.name(),
        "window": radius,
        "core": core,
        "dimension": basis.len(),
        "basis": basis.iter().map(element_to_json).collect::<Vec<_>>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{int, ratio};
    use BasisSymbol::*;

    #[test]
    fn element_round_trip() {
        let x = Element::from_terms([(L(0), int(4)), (H(-1), int(-3)), (C, ratio(1, 2))]);
        let s = element_to_string(&x);
        assert_eq!(
            s,
            r#"[{"family":"L","index":0,"coeff":"4/1"},{"family":"H","index":-1,"coeff":"-3/1"},{"family":"c","coeff":"1/2"}]"#
        );
        assert_eq!(element_from_str(&s).unwrap(), x);
    }

    #[test]
    fn element_parsing_canonicalizes() {
        let s = r#"[{"family":"c","coeff":"2/4"},{"family":"L","index":1,"coeff":"1"},{"family":"L","index":1,"coeff":"-1/1"}]"#;
        assert_eq!(element_from_str(s).unwrap(), Element::term(C, ratio(1, 2)));
        assert!(element_from_str(r#"[{"family":"X","index":1,"coeff":"1"}]"#).is_err());
        assert!(element_from_str(r#"[{"family":"c","index":1,"coeff":"1"}]"#).is_err());
        assert!(element_from_str(r#"[{"family":"L","coeff":"1"}]"#).is_err());
        assert!(element_from_str(r#"[{"family":"L","index":1,"coeff":"1/0"}]"#).is_err());
    }

    #[test]
    fn map_round_trip() {
        let a: AlgebraSpec = AlgebraKind::W22.into();
        let f = BilinearMapWindow::classified(&int(2), &ratio(-1, 3), a, 1).unwrap();
        let m = MapFile::Bilinear(f);
        assert_eq!(map_file_from_str(&map_file_to_string(&m)).unwrap(), m);
        let phi = MapFile::Linear(LinearMapWindow::standard_d(a, 2).unwrap());
        assert_eq!(map_file_from_str(&map_file_to_string(&phi)).unwrap(), phi);
    }

    #[test]
    fn map_file_gaps_and_duplicates() {
        let a: AlgebraSpec = AlgebraKind::Witt.into();
        let phi = LinearMapWindow::identity(a, 1);
        let mut j = linear_map_to_json(&phi);
        j.entries.pop();
        assert!(matches!(map_file_from_json(&j), Err(Error::Parse(_))));
        let mut j = linear_map_to_json(&phi);
        let dup = j.entries[0].clone();
        j.entries.push(dup);
        assert!(matches!(map_file_from_json(&j), Err(Error::Parse(_))));
        let mut j = linear_map_to_json(&phi);
        j.kind = "bilinear".into();
        assert!(matches!(map_file_from_json(&j), Err(Error::Parse(_))));
    }

    #[test]
    fn map_file_rejects_foreign_symbols() {
        let s = r#"{"algebra":"witt","window":1,"kind":"linear","entries":[
            {"arg":{"family":"L","index":-1},"value":[]},
            {"arg":{"family":"L","index":0},"value":[]},
            {"arg":{"family":"L","index":1},"value":[{"family":"H","index":1,"coeff":"1"}]}]}"#;
        assert!(map_file_from_str(s).is_err());
    }
}
