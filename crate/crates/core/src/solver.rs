//! Classification by exact linear algebra.
//!
//! Each defining identity (biderivation, derivation, commuting,
//! symmetric biderivation) is instantiated on every admissible tuple of
//! window basis symbols. Comparing coefficients of each output symbol gives
//! one homogeneous linear row in the unknown coefficients of the map. The
//! nullspace of that system is the space of maps on the window; restricting
//! it to a smaller core removes the freedom left at the window boundary.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::time::Instant;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::algebra::{AlgebraSpec, BasisSymbol, Element};
use crate::error::{Error, Result};
use crate::linalg::{self, EliminationOptions, SparseVec};
use crate::maps::{sweep_bilinear, sweep_linear, BilinearMapWindow, Check, LinearMapWindow, ResidualFailure};
use crate::scalar::{int, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Problem {
    Biderivation,
    Derivation,
    Commuting,
    SymmetricBiderivation,
}

impl Problem {
    pub const ALL: [Problem; 4] = [
        Problem::Biderivation,
        Problem::Derivation,
        Problem::Commuting,
        Problem::SymmetricBiderivation,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Problem::Biderivation => "biderivation",
            Problem::Derivation => "derivation",
            Problem::Commuting => "commuting",
            Problem::SymmetricBiderivation => "symmetric-biderivation",
        }
    }

    pub fn from_name(s: &str) -> Result<Self> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown problem {s:?}")))
    }

    pub fn is_bilinear(&self) -> bool {
        matches!(self, Problem::Biderivation | Problem::SymmetricBiderivation)
    }

    pub fn check(&self) -> Check {
        match self {
            Problem::Biderivation => Check::Biderivation,
            Problem::Derivation => Check::Derivation,
            Problem::Commuting => Check::Commuting,
            Problem::SymmetricBiderivation => Check::SymmetricBiderivation,
        }
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One unknown: the coefficient of `out` in the value of the map at `arg`
/// (linear) or at `(arg1, arg2)` (bilinear). Ordered lexicographically in
/// canonical symbol order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum UnknownIndex {
    Linear {
        arg: BasisSymbol,
        out: BasisSymbol,
    },
    Bilinear {
        arg1: BasisSymbol,
        arg2: BasisSymbol,
        out: BasisSymbol,
    },
}

/// Column layout of a system: arguments on radius `arg_radius`, values on
/// radius `value_radius`. Column index is the lexicographic rank of the
/// corresponding [`UnknownIndex`].
#[derive(Clone, Debug)]
pub struct Layout {
    pub algebra: AlgebraSpec,
    pub arg_radius: u32,
    pub value_radius: u32,
    pub bilinear: bool,
    args: Vec<BasisSymbol>,
    outs: Vec<BasisSymbol>,
    arg_pos: HashMap<BasisSymbol, usize>,
}

impl Layout {
    pub fn new(algebra: AlgebraSpec, arg_radius: u32, value_radius: u32, bilinear: bool) -> Self {
        let args = algebra.window_symbols(arg_radius);
        let outs = algebra.window_symbols(value_radius);
        let arg_pos = args.iter().enumerate().map(|(i, s)| (*s, i)).collect();
        Layout {
            algebra,
            arg_radius,
            value_radius,
            bilinear,
            args,
            outs,
            arg_pos,
        }
    }

    pub fn args(&self) -> &[BasisSymbol] {
        &self.args
    }

    pub fn outs(&self) -> &[BasisSymbol] {
        &self.outs
    }

    pub fn column_count(&self) -> usize {
        let a = self.args.len();
        let o = self.outs.len();
        if self.bilinear {
            a * a * o
        } else {
            a * o
        }
    }

    fn col1(&self, arg: usize, out: usize) -> usize {
        arg * self.outs.len() + out
    }

    fn col2(&self, arg1: usize, arg2: usize, out: usize) -> usize {
        (arg1 * self.args.len() + arg2) * self.outs.len() + out
    }

    pub fn unknown(&self, col: usize) -> UnknownIndex {
        let o = self.outs.len();
        let out = self.outs[col % o];
        if self.bilinear {
            let pair = col / o;
            UnknownIndex::Bilinear {
                arg1: self.args[pair / self.args.len()],
                arg2: self.args[pair % self.args.len()],
                out,
            }
        } else {
            UnknownIndex::Linear {
                arg: self.args[col / o],
                out,
            }
        }
    }

    pub fn columns(&self) -> Vec<UnknownIndex> {
        (0..self.column_count()).map(|c| self.unknown(c)).collect()
    }

    /// Column of `unknown`, if it belongs to this layout.
    pub fn column_of(&self, unknown: &UnknownIndex) -> Option<usize> {
        let out_pos = |s: &BasisSymbol| self.outs.binary_search(s).ok();
        match (unknown, self.bilinear) {
            (UnknownIndex::Linear { arg, out }, false) => Some(self.col1(*self.arg_pos.get(arg)?, out_pos(out)?)),
            (UnknownIndex::Bilinear { arg1, arg2, out }, true) => Some(self.col2(
                *self.arg_pos.get(arg1)?,
                *self.arg_pos.get(arg2)?,
                out_pos(out)?,
            )),
            _ => None,
        }
    }

    pub fn vector_to_linear_map(&self, v: &SparseVec) -> Result<LinearMapWindow> {
        debug_assert!(!self.bilinear);
        let mut values: BTreeMap<BasisSymbol, Element> = self.args.iter().map(|s| (*s, Element::zero())).collect();
        for (c, x) in v {
            if let UnknownIndex::Linear { arg, out } = self.unknown(*c) {
                values.get_mut(&arg).expect("window arg").add_term(out, x.clone());
            }
        }
        LinearMapWindow::from_table(self.algebra, self.arg_radius, values)
    }

    pub fn vector_to_bilinear_map(&self, v: &SparseVec) -> Result<BilinearMapWindow> {
        debug_assert!(self.bilinear);
        let mut values: BTreeMap<(BasisSymbol, BasisSymbol), Element> = BTreeMap::new();
        for a in &self.args {
            for b in &self.args {
                values.insert((*a, *b), Element::zero());
            }
        }
        for (c, x) in v {
            if let UnknownIndex::Bilinear { arg1, arg2, out } = self.unknown(*c) {
                values.get_mut(&(arg1, arg2)).expect("window pair").add_term(out, x.clone());
            }
        }
        BilinearMapWindow::from_table_with_value_radius(self.algebra, self.arg_radius, self.value_radius, values)
    }

    pub fn linear_map_to_vector(&self, phi: &LinearMapWindow) -> Result<SparseVec> {
        let mut v = Vec::new();
        for (i, s) in self.args.iter().enumerate() {
            for (out, x) in phi.value(*s)?.terms() {
                let o = self.out_index(*out)?;
                v.push((self.col1(i, o), x.clone()));
            }
        }
        v.sort_by_key(|e| e.0);
        Ok(v)
    }

    pub fn bilinear_map_to_vector(&self, f: &BilinearMapWindow) -> Result<SparseVec> {
        let mut v = Vec::new();
        for (i, a) in self.args.iter().enumerate() {
            for (j, b) in self.args.iter().enumerate() {
                for (out, x) in f.value(*a, *b)?.terms() {
                    let o = self.out_index(*out)?;
                    v.push((self.col2(i, j, o), x.clone()));
                }
            }
        }
        v.sort_by_key(|e| e.0);
        Ok(v)
    }

    fn out_index(&self, s: BasisSymbol) -> Result<usize> {
        self.outs.binary_search(&s).map_err(|_| Error::OutOfWindow {
            symbol: s,
            radius: self.value_radius,
        })
    }
}

/// Which identity instance produced a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Identity {
    BiderivationLeft,
    BiderivationRight,
    Derivation,
    Commuting,
    Symmetry,
}

impl Identity {
    fn arity(&self) -> usize {
        match self {
            Identity::BiderivationLeft | Identity::BiderivationRight => 3,
            _ => 2,
        }
    }
}

/// Provenance of one row: identity, the basis tuple it was instantiated on
/// (as positions in the window argument list) and the compared output
/// symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RowTag {
    pub identity: Identity,
    args: [u16; 3],
    pub output: BasisSymbol,
}

impl RowTag {
    pub fn args(&self, layout: &Layout) -> Vec<BasisSymbol> {
        self.args[..self.identity.arity()]
            .iter()
            .map(|i| layout.args[*i as usize])
            .collect()
    }
}

/// Homogeneous sparse system. Each row is an exact rational row scaled to
/// coprime integers; scaling never changes the solution set.
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    pub problem: Problem,
    pub layout: Layout,
    pub rows: Vec<Vec<(usize, i64)>>,
    pub tags: Vec<RowTag>,
}

impl ConstraintSystem {
    pub fn column_count(&self) -> usize {
        self.layout.column_count()
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    /// Residual `row · v` for each row; all zero iff `v` solves the system.
    pub fn violated_rows(&self, v: &SparseVec) -> Vec<usize> {
        let dense: HashMap<usize, &Scalar> = v.iter().map(|(c, x)| (*c, x)).collect();
        self.rows
            .iter()
            .enumerate()
            .filter(|(_, r)| {
                let mut acc = Scalar::zero();
                for (c, k) in r.iter() {
                    if let Some(x) = dense.get(c) {
                        acc += *x * int(*k);
                    }
                }
                !acc.is_zero()
            })
            .map(|(i, _)| i)
            .collect()
    }
}

/// Structure constants multiplied by 12, which clears every denominator
/// of `(m^3 - m)/12`.
type ScaledBracket = Vec<(BasisSymbol, i64)>;

/// Bracket support as (argument position, scaled coefficient).
type ScaledPositions = Vec<(usize, i64)>;

/// Integer row with its provenance.
type TaggedRow = (Vec<(usize, i64)>, RowTag);

fn scaled(e: &Element) -> Result<ScaledBracket> {
    e.terms()
        .map(|(s, c)| {
            let v = c * int(12);
            if !v.is_integer() {
                return Err(Error::IndexOverflow(format!("unexpected denominator in {e}")));
            }
            v.to_integer()
                .to_i64()
                .map(|k| (*s, k))
                .ok_or_else(|| Error::IndexOverflow(format!("structure constant too large in {e}")))
        })
        .collect()
}

struct Tables {
    /// `[args[i], outs[o]]`
    arg_out: Vec<Vec<ScaledBracket>>,
    /// `[outs[o], args[i]]`
    out_arg: Vec<Vec<ScaledBracket>>,
    /// positions of the support of `[args[i], args[j]]` in `args`, or
    /// `None` when some symbol leaves the window
    arg_arg_pos: Vec<Vec<Option<ScaledPositions>>>,
}

impl Tables {
    fn new(layout: &Layout) -> Result<Self> {
        let a = &layout.algebra;
        let arg_arg = layout
            .args
            .iter()
            .map(|x| layout.args.iter().map(|y| scaled(&a.bracket_basis(*x, *y)?)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let arg_out = layout
            .args
            .iter()
            .map(|x| layout.outs.iter().map(|o| scaled(&a.bracket_basis(*x, *o)?)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let out_arg = layout
            .outs
            .iter()
            .map(|o| layout.args.iter().map(|x| scaled(&a.bracket_basis(*o, *x)?)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        let arg_arg_pos = arg_arg
            .iter()
            .map(|row| {
                row.iter()
                    .map(|br| {
                        br.iter()
                            .map(|(s, k)| layout.arg_pos.get(s).map(|p| (*p, *k)))
                            .collect::<Option<Vec<_>>>()
                    })
                    .collect()
            })
            .collect();
        Ok(Tables {
            arg_out,
            out_arg,
            arg_arg_pos,
        })
    }
}

/// Linear expression grouped by output symbol: output -> column -> coefficient.
#[derive(Default)]
struct Expr {
    by_output: BTreeMap<BasisSymbol, BTreeMap<usize, i128>>,
}

impl Expr {
    fn add(&mut self, out: BasisSymbol, col: usize, k: i128) {
        if k == 0 {
            return;
        }
        *self.by_output.entry(out).or_default().entry(col).or_insert(0) += k;
    }

    fn into_rows(self, identity: Identity, args: [u16; 3]) -> Result<Vec<TaggedRow>> {
        let mut out = Vec::new();
        for (output, cols) in self.by_output {
            let mut g = 0i128;
            for k in cols.values() {
                g = g.gcd(k);
            }
            if g == 0 {
                continue;
            }
            let row = cols
                .into_iter()
                .filter(|(_, k)| *k != 0)
                .map(|(c, k)| {
                    i64::try_from(k / g)
                        .map(|k| (c, k))
                        .map_err(|_| Error::IndexOverflow("row coefficient exceeds 64 bits".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            out.push((row, RowTag { identity, args, output }));
        }
        Ok(out)
    }
}

fn check_radii(window: u32, value_radius: u32) -> Result<()> {
    if window < 1 {
        return Err(Error::WindowTooSmall("window radius must be at least 1".into()));
    }
    if value_radius < 2 * window {
        return Err(Error::WindowTooSmall(format!(
            "value radius {value_radius} is below twice the window radius {window}"
        )));
    }
    Ok(())
}

fn collect_rows<F>(layout: Layout, problem: Problem, instances: Vec<(usize, usize, usize)>, build: F) -> Result<ConstraintSystem>
where
    F: Fn(usize, usize, usize) -> Result<Vec<TaggedRow>> + Sync,
{
    let chunks: Vec<Vec<TaggedRow>> = instances
        .par_iter()
        .map(|&(i, j, k)| build(i, j, k))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    let mut tags = Vec::new();
    for (r, t) in chunks.into_iter().flatten() {
        rows.push(r);
        tags.push(t);
    }
    if rows.is_empty() {
        return Err(Error::WindowTooSmall("no admissible identity instance".into()));
    }
    Ok(ConstraintSystem {
        problem,
        layout,
        rows,
        tags,
    })
}

fn biderivation_rows(layout: &Layout, t: &Tables, i: usize, j: usize, k: usize) -> Result<Vec<TaggedRow>> {
    let no = layout.outs.len();
    let args = [i as u16, j as u16, k as u16];
    let mut rows = Vec::new();

    // f([x,y],z) - [x,f(y,z)] - [f(x,z),y]
    if let Some(xy) = &t.arg_arg_pos[i][j] {
        let mut e = Expr::default();
        for &(w, s) in xy {
            for o in 0..no {
                e.add(layout.outs[o], layout.col2(w, k, o), s as i128);
            }
        }
        for o in 0..no {
            for &(sym, b) in &t.arg_out[i][o] {
                e.add(sym, layout.col2(j, k, o), -(b as i128));
            }
            for &(sym, b) in &t.out_arg[o][j] {
                e.add(sym, layout.col2(i, k, o), -(b as i128));
            }
        }
        rows.extend(e.into_rows(Identity::BiderivationLeft, args)?);
    }

    // f(x,[y,z]) - [f(x,y),z] - [y,f(x,z)]
    if let Some(yz) = &t.arg_arg_pos[j][k] {
        let mut e = Expr::default();
        for &(w, s) in yz {
            for o in 0..no {
                e.add(layout.outs[o], layout.col2(i, w, o), s as i128);
            }
        }
        for o in 0..no {
            for &(sym, b) in &t.out_arg[o][k] {
                e.add(sym, layout.col2(i, j, o), -(b as i128));
            }
            for &(sym, b) in &t.arg_out[j][o] {
                e.add(sym, layout.col2(i, k, o), -(b as i128));
            }
        }
        rows.extend(e.into_rows(Identity::BiderivationRight, args)?);
    }
    Ok(rows)
}

/// Both biderivation axioms on every ordered triple of window symbols whose
/// needed arguments stay in the window. Unknowns are the coefficients of
/// `f(e_i, e_j)` on radius `value_radius` plus `c`.
pub fn assemble_biderivation_system(algebra: AlgebraSpec, window: u32, value_radius: u32) -> Result<ConstraintSystem> {
    check_radii(window, value_radius)?;
    let layout = Layout::new(algebra, window, value_radius, true);
    let tables = Tables::new(&layout)?;
    let n = layout.args.len();
    let triples: Vec<_> = (0..n)
        .flat_map(|i| (0..n).flat_map(move |j| (0..n).map(move |k| (i, j, k))))
        .collect();
    let l = layout.clone();
    collect_rows(layout, Problem::Biderivation, triples, |i, j, k| biderivation_rows(&l, &tables, i, j, k))
}

/// Biderivation rows together with `f(e_i,e_j) = f(e_j,e_i)`.
pub fn assemble_symmetric_biderivation_system(algebra: AlgebraSpec, window: u32, value_radius: u32) -> Result<ConstraintSystem> {
    let mut sys = assemble_biderivation_system(algebra, window, value_radius)?;
    sys.problem = Problem::SymmetricBiderivation;
    let layout = sys.layout.clone();
    let n = layout.args.len();
    for i in 0..n {
        for j in (i + 1)..n {
            for (o, out) in layout.outs.iter().enumerate() {
                sys.rows.push(vec![(layout.col2(i, j, o), 1), (layout.col2(j, i, o), -1)]);
                sys.tags.push(RowTag {
                    identity: Identity::Symmetry,
                    args: [i as u16, j as u16, 0],
                    output: *out,
                });
            }
        }
    }
    Ok(sys)
}

/// `phi([x,y]) = [phi(x),y] + [x,phi(y)]` on every ordered window pair with
/// `[x,y]` inside the window.
pub fn assemble_derivation_system(algebra: AlgebraSpec, window: u32, value_radius: u32) -> Result<ConstraintSystem> {
    check_radii(window, value_radius)?;
    let layout = Layout::new(algebra, window, value_radius, false);
    let t = Tables::new(&layout)?;
    let n = layout.args.len();
    let no = layout.outs.len();
    let pairs: Vec<_> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j, 0))).collect();
    let l = layout.clone();
    collect_rows(layout, Problem::Derivation, pairs, |i, j, _| {
        let Some(xy) = &t.arg_arg_pos[i][j] else {
            return Ok(Vec::new());
        };
        let mut e = Expr::default();
        for &(w, s) in xy {
            for o in 0..no {
                e.add(l.outs[o], l.col1(w, o), s as i128);
            }
        }
        for o in 0..no {
            for &(sym, b) in &t.out_arg[o][j] {
                e.add(sym, l.col1(i, o), -(b as i128));
            }
            for &(sym, b) in &t.arg_out[i][o] {
                e.add(sym, l.col1(j, o), -(b as i128));
            }
        }
        e.into_rows(Identity::Derivation, [i as u16, j as u16, 0])
    })
}

/// `[phi(x),y] + [phi(y),x] = 0` on every unordered window pair.
pub fn assemble_commuting_system(algebra: AlgebraSpec, window: u32, value_radius: u32) -> Result<ConstraintSystem> {
    check_radii(window, value_radius)?;
    let layout = Layout::new(algebra, window, value_radius, false);
    let t = Tables::new(&layout)?;
    let n = layout.args.len();
    let no = layout.outs.len();
    let pairs: Vec<_> = (0..n).flat_map(|i| (i..n).map(move |j| (i, j, 0))).collect();
    let l = layout.clone();
    collect_rows(layout, Problem::Commuting, pairs, |i, j, _| {
        let mut e = Expr::default();
        for o in 0..no {
            for &(sym, b) in &t.out_arg[o][j] {
                e.add(sym, l.col1(i, o), b as i128);
            }
            for &(sym, b) in &t.out_arg[o][i] {
                e.add(sym, l.col1(j, o), b as i128);
            }
        }
        e.into_rows(Identity::Commuting, [i as u16, j as u16, 0])
    })
}

pub fn assemble(problem: Problem, algebra: AlgebraSpec, window: u32, value_radius: u32) -> Result<ConstraintSystem> {
    match problem {
        Problem::Biderivation => assemble_biderivation_system(algebra, window, value_radius),
        Problem::Derivation => assemble_derivation_system(algebra, window, value_radius),
        Problem::Commuting => assemble_commuting_system(algebra, window, value_radius),
        Problem::SymmetricBiderivation => assemble_symmetric_biderivation_system(algebra, window, value_radius),
    }
}

/// Basis of a solution space in reduced row echelon form over the column
/// order of `layout`.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub layout: Layout,
    pub basis: Vec<SparseVec>,
}

impl SolutionSpace {
    pub fn dimension(&self) -> usize {
        self.basis.len()
    }

    pub fn bilinear_maps(&self) -> Result<Vec<BilinearMapWindow>> {
        self.basis.iter().map(|v| self.layout.vector_to_bilinear_map(v)).collect()
    }

    pub fn linear_maps(&self) -> Result<Vec<LinearMapWindow>> {
        self.basis.iter().map(|v| self.layout.vector_to_linear_map(v)).collect()
    }

    /// Whether `v` lies in the span of the basis.
    pub fn contains(&self, v: &SparseVec) -> bool {
        reduce_against(&self.basis, v).is_empty()
    }
}

pub fn nullspace(system: &ConstraintSystem, opts: EliminationOptions) -> SolutionSpace {
    SolutionSpace {
        layout: system.layout.clone(),
        basis: linalg::nullspace_i64(system.column_count(), &system.rows, opts),
    }
}

/// Restricts every basis vector to unknowns whose arguments have degree
/// `|d| <= core` (c included) and re-reduces.
pub fn project_to_core(sol: &SolutionSpace, core: u32) -> Result<SolutionSpace> {
    let window = sol.layout.arg_radius;
    if core > window {
        return Err(Error::InvalidCore { core, window });
    }
    let core_layout = Layout::new(sol.layout.algebra, core, sol.layout.value_radius, sol.layout.bilinear);
    let projected: Vec<SparseVec> = sol
        .basis
        .iter()
        .map(|v| {
            v.iter()
                .filter_map(|(c, x)| core_layout.column_of(&sol.layout.unknown(*c)).map(|cc| (cc, x.clone())))
                .collect::<SparseVec>()
        })
        .map(|mut v| {
            v.sort_by_key(|e| e.0);
            v
        })
        .collect();
    Ok(SolutionSpace {
        basis: linalg::rref(core_layout.column_count(), &projected),
        layout: core_layout,
    })
}

/// Remainder of `v` after elimination by reduced rows `rref`.
pub fn reduce_against(rref: &[SparseVec], v: &SparseVec) -> SparseVec {
    let mut acc: BTreeMap<usize, Scalar> = v.iter().cloned().collect();
    for row in rref {
        let (pivot, _) = row[0];
        let Some(k) = acc.get(&pivot).cloned() else {
            continue;
        };
        for (c, x) in row {
            let e = acc.entry(*c).or_insert_with(Scalar::zero);
            *e -= &k * x;
            if e.is_zero() {
                acc.remove(c);
            }
        }
    }
    acc.into_iter().collect()
}

/// Reads off `(lambda, mu)` from `f(L_1, L_-1) = 2 lambda L_0 + 2 mu H_0`
/// and checks `f(x,y) = lambda [x,y] + mu [omega(x),y]` on every window pair.
pub fn extract_parameters(f: &BilinearMapWindow) -> Result<(Scalar, Scalar)> {
    use BasisSymbol::*;
    if f.radius() < 1 {
        return Err(Error::WindowTooSmall("parameter extraction needs radius >= 1".into()));
    }
    let a = f.algebra();
    let probe = f.value(L(1), L(-1))?;
    let two = int(2);
    let lambda = probe.coeff(L(0)) / &two;
    let mu = if a.kind.has_h() {
        probe.coeff(H(0)) / &two
    } else {
        Scalar::zero()
    };
    let expected = BilinearMapWindow::classified(&lambda, &mu, a, f.radius())?;
    for ((x, y), v) in f.values() {
        let residual = v - expected.value(*x, *y)?;
        if !residual.is_zero() {
            return Err(Error::NotInClassifiedFamily {
                args: vec![*x, *y],
                residual,
            });
        }
    }
    Ok((lambda, mu))
}

/// Reads off `(lambda, mu)` from `phi(L_1)` and checks that
/// `phi(x) - lambda x - mu omega(x)` is a multiple of `c` for every window
/// symbol.
pub fn extract_commuting_parameters(phi: &LinearMapWindow) -> Result<(Scalar, Scalar)> {
    use BasisSymbol::*;
    if phi.radius() < 1 {
        return Err(Error::WindowTooSmall("parameter extraction needs radius >= 1".into()));
    }
    let a = phi.algebra();
    let probe = phi.value(L(1))?;
    let lambda = probe.coeff(L(1));
    let mu = if a.kind.has_h() { probe.coeff(H(1)) } else { Scalar::zero() };
    for (x, v) in phi.values() {
        let mut expected = Element::basis(*x).scale(&lambda);
        if a.kind.has_h() {
            expected.add_scaled(&a.omega_basis(*x)?, &mu);
        }
        let residual = v - &expected;
        if residual.support().any(|s| !s.is_central()) {
            return Err(Error::NotInClassifiedFamily {
                args: vec![*x],
                residual,
            });
        }
    }
    Ok((lambda, mu))
}

/// First `(x, y, out)` where a value of `f` has a component of degree other
/// than `deg x + deg y`.
pub fn grading_violation(f: &BilinearMapWindow) -> Option<(BasisSymbol, BasisSymbol, BasisSymbol)> {
    f.values().iter().find_map(|((x, y), v)| {
        v.support()
            .find(|o| o.degree() != x.degree() + y.degree())
            .map(|o| (*x, *y, o))
    })
}

/// Core-restricted inner derivations `ad(e)` for every symbol `e` of the
/// full window, as vectors over `core_layout`.
pub fn inner_derivation_vectors(core_layout: &Layout, window: u32) -> Result<Vec<SparseVec>> {
    let a = core_layout.algebra;
    a.window_symbols(window)
        .into_iter()
        .map(|e| {
            let phi = LinearMapWindow::inner_derivation(&Element::basis(e), a, core_layout.arg_radius)?;
            core_layout.linear_map_to_vector(&phi)
        })
        .collect()
}

/// Maps `e -> c` for each core symbol `e` (empty without a center).
pub fn central_valued_vectors(core_layout: &Layout) -> Result<Vec<SparseVec>> {
    let a = core_layout.algebra;
    if !a.kind.has_center() {
        return Ok(Vec::new());
    }
    core_layout
        .args()
        .iter()
        .map(|e| {
            let col = core_layout
                .column_of(&UnknownIndex::Linear {
                    arg: *e,
                    out: BasisSymbol::C,
                })
                .expect("c is an output symbol");
            Ok(vec![(col, int(1))])
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CoreMap {
    Linear(LinearMapWindow),
    Bilinear(BilinearMapWindow),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResidualCheck {
    Pass,
    Fail { basis_index: usize, failure: ResidualFailure },
}

#[derive(Clone, Debug)]
pub struct ClassifyConfig {
    pub problem: Problem,
    pub algebra: AlgebraSpec,
    pub window: u32,
    pub value_radius: u32,
    pub core: u32,
    pub parallel: bool,
    /// Also classify at window `N - 1` and compare.
    pub stability: bool,
}

impl ClassifyConfig {
    pub fn new(problem: Problem, algebra: AlgebraSpec, window: u32, core: u32) -> Self {
        ClassifyConfig {
            problem,
            algebra,
            window,
            value_radius: 2 * window,
            core,
            parallel: false,
            stability: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ClassificationReport {
    pub algebra: AlgebraSpec,
    pub problem: Problem,
    pub window: u32,
    pub value_radius: u32,
    pub core: u32,
    pub raw_dimension: usize,
    pub core_dimension: usize,
    pub core_basis: Vec<CoreMap>,
    /// `(lambda, mu)` per core basis vector, for biderivation and commuting
    /// problems.
    pub parameters: Vec<(Scalar, Scalar)>,
    /// Derivations: dimension modulo inner derivations. Commuting maps:
    /// dimension modulo c-valued maps.
    pub quotient_dimension: Option<usize>,
    pub residual_check: ResidualCheck,
    pub stability: Option<StabilityCheck>,
    pub timings_ms: BTreeMap<String, u128>,
}

/// The same classification on window `N - 1` (value radius `2(N - 1)`).
/// Compares the quotient dimension where one is defined, else the core
/// dimension; `dimension` is `None` when the smaller run fails.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilityCheck {
    pub window: u32,
    pub dimension: Option<usize>,
    pub stable: bool,
}

impl ClassificationReport {
    /// Quotient dimension where defined, else core dimension.
    pub fn invariant_dimension(&self) -> usize {
        self.quotient_dimension.unwrap_or(self.core_dimension)
    }
}

pub fn classify(cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let mut report = classify_window(cfg)?;
    if cfg.stability && cfg.window > cfg.core.max(1) {
        let t = Instant::now();
        let smaller = ClassifyConfig {
            window: cfg.window - 1,
            value_radius: 2 * (cfg.window - 1),
            stability: false,
            ..cfg.clone()
        };
        let dimension = classify_window(&smaller).ok().map(|r| r.invariant_dimension());
        report.stability = Some(StabilityCheck {
            window: smaller.window,
            dimension,
            stable: dimension == Some(report.invariant_dimension()),
        });
        report.timings_ms.insert("stability".to_string(), t.elapsed().as_millis());
    }
    Ok(report)
}

fn classify_window(cfg: &ClassifyConfig) -> Result<ClassificationReport> {
    let opts = EliminationOptions {
        parallel: cfg.parallel,
        ..Default::default()
    };
    let mut timings = BTreeMap::new();
    let t0 = Instant::now();
    let system = assemble(cfg.problem, cfg.algebra, cfg.window, cfg.value_radius)?;
    timings.insert("assemble".to_string(), t0.elapsed().as_millis());

    let t1 = Instant::now();
    let raw = nullspace(&system, opts);
    timings.insert("nullspace".to_string(), t1.elapsed().as_millis());

    let t2 = Instant::now();
    let core = project_to_core(&raw, cfg.core)?;
    timings.insert("project".to_string(), t2.elapsed().as_millis());

    let t3 = Instant::now();
    let mut parameters = Vec::new();
    let mut quotient_dimension = None;
    let core_basis: Vec<CoreMap> = if cfg.problem.is_bilinear() {
        core.bilinear_maps()?.into_iter().map(CoreMap::Bilinear).collect()
    } else {
        core.linear_maps()?.into_iter().map(CoreMap::Linear).collect()
    };

    match cfg.problem {
        Problem::Biderivation | Problem::SymmetricBiderivation => {
            for m in &core_basis {
                if let CoreMap::Bilinear(f) = m {
                    let p = extract_parameters(f)?;
                    if cfg.problem == Problem::SymmetricBiderivation {
                        // the only symmetric member of the family is zero
                        let x = f.values().iter().find(|(_, v)| !v.is_zero());
                        if let Some(((a, b), v)) = x {
                            return Err(Error::NotInClassifiedFamily {
                                args: vec![*a, *b],
                                residual: v.clone(),
                            });
                        }
                    }
                    parameters.push(p);
                }
            }
        }
        Problem::Commuting => {
            for m in &core_basis {
                if let CoreMap::Linear(phi) = m {
                    parameters.push(extract_commuting_parameters(phi)?);
                }
            }
            let central = central_valued_vectors(&core.layout)?;
            for v in &central {
                if !core.contains(v) {
                    return Err(Error::NotInClassifiedFamily {
                        args: vec![core.layout.unknown(v[0].0).arg()],
                        residual: Element::basis(BasisSymbol::C),
                    });
                }
            }
            quotient_dimension = Some(core.dimension() - central.len());
        }
        Problem::Derivation => {
            let inner = inner_derivation_vectors(&core.layout, cfg.window)?;
            let inner_rref = linalg::rref(core.layout.column_count(), &inner);
            let mut family = inner.clone();
            if cfg.algebra.kind.has_h() {
                let d = LinearMapWindow::standard_d(cfg.algebra, cfg.core)?;
                family.push(core.layout.linear_map_to_vector(&d)?);
            }
            let family_rref = linalg::rref(core.layout.column_count(), &family);
            for v in &core.basis {
                let rem = reduce_against(&family_rref, v);
                if let Some((c, _)) = rem.first() {
                    let arg = core.layout.unknown(*c).arg();
                    let phi = core.layout.vector_to_linear_map(&rem)?;
                    return Err(Error::NotInClassifiedFamily {
                        args: vec![arg],
                        residual: phi.value(arg)?.clone(),
                    });
                }
            }
            quotient_dimension = Some(core.dimension() - inner_rref.len());
        }
    }

    let mut residual_check = ResidualCheck::Pass;
    for (idx, m) in core_basis.iter().enumerate() {
        let sweep = match m {
            CoreMap::Linear(phi) => sweep_linear(phi, cfg.problem.check())?,
            CoreMap::Bilinear(f) => sweep_bilinear(f, cfg.problem.check())?,
        };
        if let Some(failure) = sweep.failures.into_iter().next() {
            residual_check = ResidualCheck::Fail {
                basis_index: idx,
                failure,
            };
            break;
        }
    }
    timings.insert("analyze".to_string(), t3.elapsed().as_millis());

    Ok(ClassificationReport {
        algebra: cfg.algebra,
        problem: cfg.problem,
        window: cfg.window,
        value_radius: cfg.value_radius,
        core: cfg.core,
        raw_dimension: raw.dimension(),
        core_dimension: core.dimension(),
        core_basis,
        parameters,
        quotient_dimension,
        residual_check,
        stability: None,
        timings_ms: timings,
    })
}

impl UnknownIndex {
    /// First argument symbol.
    pub fn arg(&self) -> BasisSymbol {
        match self {
            UnknownIndex::Linear { arg, .. } => *arg,
            UnknownIndex::Bilinear { arg1, .. } => *arg1,
        }
    }
}
