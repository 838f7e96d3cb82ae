//! Basis symbols, exact elements, and the bracket of the Virasoro-type
//! algebras: Virasoro, Witt, W(2,2) and centerless W(2,2).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, EliminationOptions, SparseVec};
use crate::scalar::{display_scalar, Scalar};

pub const DEFAULT_INDEX_LIMIT: i64 = i32::MAX as i64;

/// A basis label. The derived order is the canonical one: every `L` before
/// every `H` before `c`, indices ascending within a family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisSymbol {
    L(i64),
    H(i64),
    C,
}

impl BasisSymbol {
    pub fn degree(&self) -> i64 {
        match self {
            BasisSymbol::L(n) | BasisSymbol::H(n) => *n,
            BasisSymbol::C => 0,
        }
    }

    pub fn is_central(&self) -> bool {
        matches!(self, BasisSymbol::C)
    }
}

impl fmt::Display for BasisSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisSymbol::L(n) => write!(f, "L({n})"),
            BasisSymbol::H(n) => write!(f, "H({n})"),
            BasisSymbol::C => write!(f, "c"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AlgebraKind {
    #[serde(rename = "vir")]
    Virasoro,
    #[serde(rename = "witt")]
    Witt,
    #[serde(rename = "w22")]
    W22,
    #[serde(rename = "w22-centerless")]
    W22Centerless,
}

impl AlgebraKind {
    pub const ALL: [AlgebraKind; 4] = [
        AlgebraKind::Virasoro,
        AlgebraKind::Witt,
        AlgebraKind::W22,
        AlgebraKind::W22Centerless,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            AlgebraKind::Virasoro => "vir",
            AlgebraKind::Witt => "witt",
            AlgebraKind::W22 => "w22",
            AlgebraKind::W22Centerless => "w22-centerless",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        AlgebraKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algebra {s:?}")))
    }

    pub fn has_center(&self) -> bool {
        matches!(self, AlgebraKind::Virasoro | AlgebraKind::W22)
    }

    pub fn has_h(&self) -> bool {
        matches!(self, AlgebraKind::W22 | AlgebraKind::W22Centerless)
    }
}

impl fmt::Display for AlgebraKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Which algebra, plus the bound on admissible degree indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraSpec {
    pub kind: AlgebraKind,
    pub index_limit: i64,
}

impl From<AlgebraKind> for AlgebraSpec {
    fn from(kind: AlgebraKind) -> Self {
        AlgebraSpec::new(kind)
    }
}

impl AlgebraSpec {
    pub fn new(kind: AlgebraKind) -> Self {
        AlgebraSpec {
            kind,
            index_limit: DEFAULT_INDEX_LIMIT,
        }
    }

    pub fn with_index_limit(mut self, limit: i64) -> Self {
        self.index_limit = limit;
        self
    }

    pub fn validate(&self, s: BasisSymbol) -> Result<()> {
        let ok = match s {
            BasisSymbol::L(n) => n.abs() <= self.index_limit,
            BasisSymbol::H(n) => self.kind.has_h() && n.abs() <= self.index_limit,
            BasisSymbol::C => self.kind.has_center(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSymbol {
                symbol: s,
                algebra: self.kind,
            })
        }
    }

    pub fn validate_element(&self, x: &Element) -> Result<()> {
        x.support().try_for_each(|s| self.validate(s))
    }

    fn checked_sum(&self, m: i64, n: i64) -> Result<i64> {
        m.checked_add(n)
            .filter(|s| s.abs() <= self.index_limit)
            .ok_or_else(|| Error::IndexOverflow(format!("{m} + {n} exceeds index limit {}", self.index_limit)))
    }

    /// Bracket of two basis symbols.
    pub fn bracket_basis(&self, a: BasisSymbol, b: BasisSymbol) -> Result<Element> {
        use BasisSymbol::*;
        self.validate(a)?;
        self.validate(b)?;
        let mut out = Element::zero();
        match (a, b) {
            (L(m), L(n)) => {
                out.add_term(L(self.checked_sum(m, n)?), Scalar::from_integer((m as i128 - n as i128).into()));
                if self.kind.has_center() && m as i128 + n as i128 == 0 {
                    out.add_term(C, central_charge(m));
                }
            }
            (L(m), H(n)) => {
                out.add_term(H(self.checked_sum(m, n)?), Scalar::from_integer((m as i128 - n as i128).into()));
                if self.kind.has_center() && m as i128 + n as i128 == 0 {
                    out.add_term(C, central_charge(m));
                }
            }
            (H(_), L(_)) => return Ok(-self.bracket_basis(b, a)?),
            (H(_), H(_)) | (C, _) | (_, C) => {}
        }
        Ok(out)
    }

    pub fn bracket(&self, x: &Element, y: &Element) -> Result<Element> {
        let mut out = Element::zero();
        for (a, ca) in x.terms() {
            for (b, cb) in y.terms() {
                let ab = self.bracket_basis(*a, *b)?;
                out.add_scaled(&ab, &(ca * cb));
            }
        }
        Ok(out)
    }

    /// The linear map L(m) -> H(m), H(m) -> 0, c -> 0.
    pub fn omega(&self, x: &Element) -> Result<Element> {
        if !self.kind.has_h() {
            return Err(Error::UnsupportedAlgebra {
                op: "omega",
                algebra: self.kind,
            });
        }
        self.validate_element(x)?;
        let mut out = Element::zero();
        for (s, c) in x.terms() {
            if let BasisSymbol::L(m) = s {
                out.add_term(BasisSymbol::H(*m), c.clone());
            }
        }
        Ok(out)
    }

    pub fn omega_basis(&self, s: BasisSymbol) -> Result<Element> {
        self.omega(&Element::basis(s))
    }

    /// `[[x,y],z] + [[y,z],x] + [[z,x],y]`.
    pub fn jacobi_residual(&self, x: &Element, y: &Element, z: &Element) -> Result<Element> {
        let a = self.bracket(&self.bracket(x, y)?, z)?;
        let b = self.bracket(&self.bracket(y, z)?, x)?;
        let c = self.bracket(&self.bracket(z, x)?, y)?;
        Ok(&(&a + &b) + &c)
    }

    /// Basis symbols of degree `|d| <= radius`, plus `c` when present, in
    /// canonical order.
    pub fn window_symbols(&self, radius: u32) -> Vec<BasisSymbol> {
        let r = radius as i64;
        let mut out: Vec<BasisSymbol> = (-r..=r).map(BasisSymbol::L).collect();
        if self.kind.has_h() {
            out.extend((-r..=r).map(BasisSymbol::H));
        }
        if self.kind.has_center() {
            out.push(BasisSymbol::C);
        }
        out
    }

    pub fn in_window(&self, s: BasisSymbol, radius: u32) -> bool {
        s.degree().abs() <= radius as i64 && self.validate(s).is_ok()
    }

    /// Basis of the elements supported on the window that commute with
    /// every window symbol, brackets evaluated exactly (no truncation).
    pub fn center_basis(&self, radius: u32) -> Result<Vec<Element>> {
        if radius < 1 {
            return Err(Error::WindowTooSmall("center needs radius >= 1".into()));
        }
        let symbols = self.window_symbols(radius);
        // column j <-> coefficient of symbols[j] in z
        let mut rows: BTreeMap<(BasisSymbol, BasisSymbol), SparseVec> = BTreeMap::new();
        for (j, s) in symbols.iter().enumerate() {
            for e in &symbols {
                for (out, v) in self.bracket_basis(*s, *e)?.terms() {
                    rows.entry((*e, *out)).or_default().push((j, v.clone()));
                }
            }
        }
        let rows: Vec<SparseVec> = rows.into_values().collect();
        let kernel = linalg::nullspace(symbols.len(), &rows, EliminationOptions::default());
        Ok(kernel
            .into_iter()
            .map(|v| Element::from_terms(v.into_iter().map(|(j, c)| (symbols[j], c))))
            .collect())
    }
}

/// Restricts each element to degrees `|d| <= core` (plus `c`) and returns a
/// reduced basis of the span of the restrictions.
pub fn project_to_core(elements: &[Element], core: u32) -> Vec<Element> {
    let mut symbols: Vec<BasisSymbol> = elements
        .iter()
        .flat_map(|e| e.support())
        .filter(|s| s.degree().abs() <= core as i64)
        .collect();
    symbols.sort();
    symbols.dedup();
    let rows: Vec<SparseVec> = elements
        .iter()
        .map(|e| {
            symbols
                .iter()
                .enumerate()
                .filter_map(|(j, s)| {
                    let c = e.coeff(*s);
                    (!c.is_zero()).then_some((j, c))
                })
                .collect()
        })
        .collect();
    linalg::rref(symbols.len(), &rows)
        .into_iter()
        .map(|v| Element::from_terms(v.into_iter().map(|(j, c)| (symbols[j], c))))
        .collect()
}

/// `(m^3 - m) / 12`.
pub fn central_charge(m: i64) -> Scalar {
    let m = num_bigint::BigInt::from(m);
    Scalar::new(&m * &m * &m - &m, 12.into())
}

/// Finite exact linear combination of basis symbols. Zero coefficients are
/// never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Element {
    terms: BTreeMap<BasisSymbol, Scalar>,
}

impl Element {
    pub fn zero() -> Self {
        Element::default()
    }

    pub fn basis(s: BasisSymbol) -> Self {
        Element::term(s, Scalar::one())
    }

    pub fn term(s: BasisSymbol, c: Scalar) -> Self {
        let mut e = Element::zero();
        e.add_term(s, c);
        e
    }

    pub fn from_terms<I: IntoIterator<Item = (BasisSymbol, Scalar)>>(terms: I) -> Self {
        let mut e = Element::zero();
        for (s, c) in terms {
            e.add_term(s, c);
        }
        e
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, s: BasisSymbol) -> Scalar {
        self.terms.get(&s).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&BasisSymbol, &Scalar)> {
        self.terms.iter()
    }

    pub fn support(&self) -> impl Iterator<Item = BasisSymbol> + '_ {
        self.terms.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, s: BasisSymbol, c: Scalar) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(s) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_scaled(&mut self, other: &Element, k: &Scalar) {
        if k.is_zero() {
            return;
        }
        for (s, c) in other.terms() {
            self.add_term(*s, c * k);
        }
    }

    pub fn scale(&self, k: &Scalar) -> Element {
        let mut out = Element::zero();
        out.add_scaled(self, k);
        out
    }

    pub fn max_abs_degree(&self) -> i64 {
        self.support().map(|s| s.degree().abs()).max().unwrap_or(0)
    }

    /// Component of the given degree (`c` counts as degree 0).
    pub fn degree_part(&self, d: i64) -> Element {
        Element::from_terms(self.terms().filter(|(s, _)| s.degree() == d).map(|(s, c)| (*s, c.clone())))
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (s, c)) in self.terms().enumerate() {
            let neg = c < &Scalar::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (i, neg) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            write!(f, "{}·{}", display_scalar(&mag), s)?;
        }
        Ok(())
    }
}

impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &Scalar::one());
        out
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        let mut out = self.clone();
        out.add_scaled(rhs, &-Scalar::one());
        out
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Scalar::one())
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale(&-Scalar::one())
    }
}
