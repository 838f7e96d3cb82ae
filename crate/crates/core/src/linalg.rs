//! Exact sparse linear algebra over the rationals.
//!
//! Rows are kept as primitive integer vectors (content 1) and combined
//! fraction-free; division by pivots happens only when the final reduced
//! rows are turned back into rationals. The column graph is split into
//! connected components first, and each component is eliminated on its own.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::scalar::Scalar;

/// Sparse rational vector: strictly increasing column indices, no zeros.
pub type SparseVec = Vec<(usize, Scalar)>;

type IntRow = Vec<(usize, BigInt)>;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PivotRule {
    /// Pick the column with the fewest occurrences in the component
    /// (unit coefficients preferred, column index breaks ties).
    #[default]
    Markowitz,
    Leftmost,
    Rightmost,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct EliminationOptions {
    pub pivot: PivotRule,
    pub parallel: bool,
}

/// Canonical nullspace basis: the reduced row echelon form of the kernel,
/// with respect to the natural column order. The pivot rule only affects
/// the work done, never the result.
pub fn nullspace(ncols: usize, rows: &[SparseVec], opts: EliminationOptions) -> Vec<SparseVec> {
    let int_rows: Vec<IntRow> = rows.iter().filter_map(primitive_from_rational).collect();
    nullspace_primitive(ncols, int_rows, opts)
}

/// Same as [`nullspace`] for rows with machine-integer coefficients.
pub fn nullspace_i64(ncols: usize, rows: &[Vec<(usize, i64)>], opts: EliminationOptions) -> Vec<SparseVec> {
    let int_rows: Vec<IntRow> = rows
        .iter()
        .filter(|r| !r.is_empty())
        .map(|r| {
            let row: IntRow = r.iter().map(|(c, v)| (*c, BigInt::from(*v))).collect();
            make_primitive(row)
        })
        .collect();
    nullspace_primitive(ncols, int_rows, opts)
}

/// Reduced row echelon form (pivot = leftmost entry, pivot coefficient 1),
/// rows ordered by pivot column. Zero rows are dropped.
pub fn rref(ncols: usize, rows: &[SparseVec]) -> Vec<SparseVec> {
    let int_rows: Vec<IntRow> = rows.iter().filter_map(primitive_from_rational).collect();
    rref_primitive(ncols, int_rows)
}

pub fn rank(ncols: usize, rows: &[SparseVec]) -> usize {
    rref(ncols, rows).len()
}

fn nullspace_primitive(ncols: usize, rows: Vec<IntRow>, opts: EliminationOptions) -> Vec<SparseVec> {
    for r in &rows {
        debug_assert!(r.iter().all(|(c, _)| *c < ncols));
    }
    let components = split_components(ncols, rows);

    let mut used = vec![false; ncols];
    for comp in &components {
        for &c in &comp.columns {
            used[c] = true;
        }
    }

    let solve = |comp: &Component| -> Vec<SparseVec> {
        let reduced = eliminate(&comp.rows, opts.pivot, ncols);
        let raw = kernel_from_reduced(&comp.columns, &reduced);
        if opts.pivot == PivotRule::Rightmost {
            // Rightmost pivots already leave the kernel in canonical form.
            let mut raw = raw;
            raw.sort_by_key(|v| v[0].0);
            raw
        } else {
            let as_int: Vec<IntRow> = raw.iter().filter_map(primitive_from_rational).collect();
            rref_primitive(ncols, as_int)
        }
    };

    let per_component: Vec<Vec<SparseVec>> = if opts.parallel {
        components.par_iter().map(solve).collect()
    } else {
        components.iter().map(solve).collect()
    };

    let mut basis: Vec<SparseVec> = per_component.into_iter().flatten().collect();
    for (c, u) in used.iter().enumerate() {
        if !u {
            basis.push(vec![(c, Scalar::one())]);
        }
    }
    // Disjoint supports: sorting by leading column gives the global RREF.
    basis.sort_by_key(|v| v[0].0);
    basis
}

fn rref_primitive(ncols: usize, rows: Vec<IntRow>) -> Vec<SparseVec> {
    let reduced = eliminate(&rows, PivotRule::Leftmost, ncols);
    let mut out: Vec<SparseVec> = reduced
        .into_iter()
        .map(|(pivot, row)| {
            let lead = row
                .iter()
                .find(|(c, _)| *c == pivot)
                .map(|(_, v)| v.clone())
                .expect("pivot present");
            row.into_iter()
                .map(|(c, v)| (c, Scalar::new(v, lead.clone())))
                .collect::<SparseVec>()
        })
        .collect();
    out.sort_by_key(|v| v[0].0);
    out
}

struct Component {
    columns: Vec<usize>,
    rows: Vec<IntRow>,
}

fn split_components(ncols: usize, rows: Vec<IntRow>) -> Vec<Component> {
    let mut parent: Vec<usize> = (0..ncols).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for r in &rows {
        let first = r[0].0;
        for (c, _) in &r[1..] {
            let a = find(&mut parent, first);
            let b = find(&mut parent, *c);
            if a != b {
                // smaller index becomes the root so component ids are stable
                let (lo, hi) = if a < b { (a, b) } else { (b, a) };
                parent[hi] = lo;
            }
        }
    }

    let mut in_rows = vec![false; ncols];
    for r in &rows {
        for (c, _) in r {
            in_rows[*c] = true;
        }
    }

    let mut index_of_root: HashMap<usize, usize> = HashMap::new();
    let mut comps: Vec<Component> = Vec::new();
    for (c, &used) in in_rows.iter().enumerate() {
        if !used {
            continue;
        }
        let root = find(&mut parent, c);
        let idx = *index_of_root.entry(root).or_insert_with(|| {
            comps.push(Component {
                columns: Vec::new(),
                rows: Vec::new(),
            });
            comps.len() - 1
        });
        comps[idx].columns.push(c);
    }
    for r in rows {
        let root = find(&mut parent, r[0].0);
        let idx = index_of_root[&root];
        comps[idx].rows.push(r);
    }
    comps
}

/// Incremental fraction-free elimination. Returns the fully reduced pivot
/// rows as `(pivot column, row)` in insertion order: each row contains its
/// own pivot and otherwise only non-pivot columns.
fn eliminate(rows: &[IntRow], rule: PivotRule, ncols: usize) -> Vec<(usize, IntRow)> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    let mut col_count: HashMap<usize, usize> = HashMap::new();
    if rule == PivotRule::Markowitz {
        order.sort_by_key(|&i| rows[i].len());
        for r in rows {
            for (c, _) in r {
                *col_count.entry(*c).or_default() += 1;
            }
        }
    }

    let mut pivots: Vec<(usize, IntRow)> = Vec::new();
    let mut position: Vec<usize> = vec![usize::MAX; ncols];

    for i in order {
        let mut r = rows[i].clone();
        loop {
            let next = r
                .iter()
                .map(|(c, _)| position[*c])
                .filter(|&p| p != usize::MAX)
                .min();
            match next {
                Some(p) => {
                    let (pc, prow) = &pivots[p];
                    r = eliminate_column(&r, prow, *pc);
                }
                None => break,
            }
        }
        if r.is_empty() {
            continue;
        }
        let pivot = match rule {
            PivotRule::Leftmost => r[0].0,
            PivotRule::Rightmost => r[r.len() - 1].0,
            PivotRule::Markowitz => {
                r.iter()
                    .min_by_key(|(c, v)| (col_count.get(c).copied().unwrap_or(0), !v.abs().is_one(), *c))
                    .expect("nonempty row")
                    .0
            }
        };
        position[pivot] = pivots.len();
        pivots.push((pivot, r));
    }

    // Back substitution, latest rows first: those are already fully reduced.
    for t in (0..pivots.len()).rev() {
        let targets: Vec<usize> = pivots[t]
            .1
            .iter()
            .map(|(c, _)| position[*c])
            .filter(|&p| p != usize::MAX && p != t)
            .collect();
        for p in targets {
            let (pc, prow) = &pivots[p];
            let reduced = eliminate_column(&pivots[t].1, prow, *pc);
            pivots[t].1 = reduced;
        }
    }
    pivots
}

/// `a*target - b*pivot_row` scaled so that column `col` cancels, then made
/// primitive.
fn eliminate_column(target: &IntRow, pivot_row: &IntRow, col: usize) -> IntRow {
    let tv = coeff(target, col).expect("target contains column");
    let pv = coeff(pivot_row, col).expect("pivot row contains column");
    let g = tv.gcd(pv);
    let a = pv / &g;
    let b = tv / &g;

    let mut out: IntRow = Vec::with_capacity(target.len() + pivot_row.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() || j < pivot_row.len() {
        let ci = target.get(i).map(|e| e.0).unwrap_or(usize::MAX);
        let cj = pivot_row.get(j).map(|e| e.0).unwrap_or(usize::MAX);
        let (c, v) = if ci < cj {
            i += 1;
            (ci, &a * &target[i - 1].1)
        } else if cj < ci {
            j += 1;
            (cj, -(&b * &pivot_row[j - 1].1))
        } else {
            i += 1;
            j += 1;
            (ci, &a * &target[i - 1].1 - &b * &pivot_row[j - 1].1)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    make_primitive(out)
}

fn coeff(row: &IntRow, col: usize) -> Option<&BigInt> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

fn make_primitive(mut row: IntRow) -> IntRow {
    let mut g = BigInt::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            return row;
        }
    }
    if !g.is_zero() {
        for (_, v) in row.iter_mut() {
            *v = &*v / &g;
        }
    }
    row
}

fn primitive_from_rational(row: &SparseVec) -> Option<IntRow> {
    let entries: Vec<&(usize, Scalar)> = row.iter().filter(|(_, v)| !v.is_zero()).collect();
    if entries.is_empty() {
        return None;
    }
    let mut l = BigInt::one();
    for (_, v) in &entries {
        l = l.lcm(v.denom());
    }
    let mut out: IntRow = entries
        .iter()
        .map(|(c, v)| (*c, v.numer() * (&l / v.denom())))
        .collect();
    out.sort_by_key(|e| e.0);
    Some(make_primitive(out))
}

fn kernel_from_reduced(columns: &[usize], reduced: &[(usize, IntRow)]) -> Vec<SparseVec> {
    let mut is_pivot: HashMap<usize, ()> = HashMap::with_capacity(reduced.len());
    for (p, _) in reduced {
        is_pivot.insert(*p, ());
    }
    let mut kernel: HashMap<usize, SparseVec> = HashMap::new();
    for &c in columns {
        if !is_pivot.contains_key(&c) {
            kernel.insert(c, vec![(c, Scalar::one())]);
        }
    }
    for (p, row) in reduced {
        let lead = coeff(row, *p).expect("pivot present").clone();
        for (c, v) in row {
            if c == p {
                continue;
            }
            kernel
                .get_mut(c)
                .expect("non-pivot column of component")
                .push((*p, -Scalar::new(v.clone(), lead.clone())));
        }
    }
    let mut free: Vec<usize> = kernel.keys().copied().collect();
    free.sort_unstable();
    free.into_iter()
        .map(|f| {
            let mut v = kernel.remove(&f).unwrap();
            v.sort_by_key(|e| e.0);
            v
        })
        .collect()
}
