#![allow(dead_code)]

//! Dense reference computations for cross-checking the sparse engine.

use std::collections::BTreeMap;

use num_traits::{One, Zero};
use wbider::algebra::{AlgebraSpec, BasisSymbol, Element};
use wbider::linalg::SparseVec;
use wbider::maps::{Axiom, BilinearMapWindow, LinearMapWindow};
use wbider::Scalar;

pub type Dense = Vec<Vec<Scalar>>;

pub fn to_dense(v: &SparseVec, n: usize) -> Vec<Scalar> {
    let mut out = vec![Scalar::zero(); n];
    for (c, x) in v {
        out[*c] = x.clone();
    }
    out
}

/// Gauss-Jordan over the rationals with leftmost pivots and unit pivot
/// entries; zero rows dropped.
pub fn dense_rref(mut rows: Dense, ncols: usize) -> Dense {
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Scalar::one() / rows[r][c].clone();
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && !row[c].is_zero() {
                let k = row[c].clone();
                for (x, y) in row.iter_mut().zip(&pivot) {
                    *x -= &k * y;
                }
            }
        }
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    rows
}

pub fn dense_rank(rows: Dense, ncols: usize) -> usize {
    dense_rref(rows, ncols).len()
}

/// Kernel basis in reduced echelon form.
pub fn dense_nullspace(rows: Dense, ncols: usize) -> Dense {
    let red = dense_rref(rows, ncols);
    let pivots: Vec<usize> = red
        .iter()
        .map(|r| r.iter().position(|x| !x.is_zero()).unwrap())
        .collect();
    let mut kernel = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Scalar::zero(); ncols];
        v[free] = Scalar::one();
        for (row, &p) in red.iter().zip(&pivots) {
            v[p] = -row[free].clone();
        }
        kernel.push(v);
    }
    dense_rref(kernel, ncols)
}

/// Unknowns of a linear map on the window, in lexicographic order.
pub fn linear_unknowns(a: AlgebraSpec, n: u32, m: u32) -> Vec<(BasisSymbol, BasisSymbol)> {
    let outs = a.window_symbols(m);
    a.window_symbols(n)
        .into_iter()
        .flat_map(|x| outs.iter().map(move |o| (x, *o)))
        .collect()
}

pub fn bilinear_unknowns(a: AlgebraSpec, n: u32, m: u32) -> Vec<(BasisSymbol, BasisSymbol, BasisSymbol)> {
    let args = a.window_symbols(n);
    let outs = a.window_symbols(m);
    let mut v = Vec::new();
    for x in &args {
        for y in &args {
            for o in &outs {
                v.push((*x, *y, *o));
            }
        }
    }
    v
}

fn unit_linear(a: AlgebraSpec, n: u32, arg: BasisSymbol, out: BasisSymbol) -> LinearMapWindow {
    LinearMapWindow::from_fn(a, n, |s| Ok(if s == arg { Element::basis(out) } else { Element::zero() })).unwrap()
}

fn unit_bilinear(a: AlgebraSpec, n: u32, m: u32, x: BasisSymbol, y: BasisSymbol, out: BasisSymbol) -> BilinearMapWindow {
    let mut values = BTreeMap::new();
    for p in a.window_symbols(n) {
        for q in a.window_symbols(n) {
            let v = if (p, q) == (x, y) { Element::basis(out) } else { Element::zero() };
            values.insert((p, q), v);
        }
    }
    BilinearMapWindow::from_table_with_value_radius(a, n, m, values).unwrap()
}

/// Stacks residual evaluations of unit maps into a matrix whose rows are
/// indexed by (tuple, output symbol).
fn stack<T: Ord + Clone>(columns: Vec<BTreeMap<T, Scalar>>) -> Dense {
    let n = columns.len();
    let mut rows: BTreeMap<T, Vec<Scalar>> = BTreeMap::new();
    for (j, col) in columns.into_iter().enumerate() {
        for (key, x) in col {
            rows.entry(key).or_insert_with(|| vec![Scalar::zero(); n])[j] = x;
        }
    }
    rows.into_values().collect()
}

type Key = (Vec<BasisSymbol>, u8, BasisSymbol);

fn collect(into: &mut BTreeMap<Key, Scalar>, args: Vec<BasisSymbol>, tag: u8, e: &Element) {
    for (s, x) in e.terms() {
        into.insert((args.clone(), tag, *s), x.clone());
    }
}

/// Space of commuting maps on the window, one unit map at a time.
pub fn brute_force_commuting(a: AlgebraSpec, n: u32, m: u32) -> Dense {
    let unknowns = linear_unknowns(a, n, m);
    let syms = a.window_symbols(n);
    let cols = unknowns
        .iter()
        .map(|(arg, out)| {
            let phi = unit_linear(a, n, *arg, *out);
            let mut col = BTreeMap::new();
            for (i, x) in syms.iter().enumerate() {
                for y in &syms[i..] {
                    let r = phi
                        .commuting_residual(&Element::basis(*x), &Element::basis(*y))
                        .unwrap();
                    collect(&mut col, vec![*x, *y], 0, &r);
                }
            }
            col
        })
        .collect();
    dense_nullspace(stack(cols), unknowns.len())
}

/// Space of derivations on the window; pairs whose bracket leaves the
/// window are skipped.
pub fn brute_force_derivations(a: AlgebraSpec, n: u32, m: u32) -> Dense {
    let unknowns = linear_unknowns(a, n, m);
    let syms = a.window_symbols(n);
    let cols = unknowns
        .iter()
        .map(|(arg, out)| {
            let phi = unit_linear(a, n, *arg, *out);
            let mut col = BTreeMap::new();
            for x in &syms {
                for y in &syms {
                    if let Ok(r) = phi.derivation_residual(&Element::basis(*x), &Element::basis(*y)) {
                        collect(&mut col, vec![*x, *y], 0, &r);
                    }
                }
            }
            col
        })
        .collect();
    dense_nullspace(stack(cols), unknowns.len())
}

/// Space of biderivations on the window; inadmissible axiom instances are
/// skipped.
pub fn brute_force_biderivations(a: AlgebraSpec, n: u32, m: u32) -> Dense {
    let unknowns = bilinear_unknowns(a, n, m);
    let syms = a.window_symbols(n);
    let cols = unknowns
        .iter()
        .map(|(x0, y0, out)| {
            let f = unit_bilinear(a, n, m, *x0, *y0, *out);
            let mut col = BTreeMap::new();
            for x in &syms {
                for y in &syms {
                    for z in &syms {
                        let (ex, ey, ez) = (Element::basis(*x), Element::basis(*y), Element::basis(*z));
                        for (tag, axiom) in [(0u8, Axiom::Left), (1u8, Axiom::Right)] {
                            if let Ok(r) = f.biderivation_axiom_residual(axiom, &ex, &ey, &ez) {
                                collect(&mut col, vec![*x, *y, *z], tag, &r);
                            }
                        }
                    }
                }
            }
            col
        })
        .collect();
    dense_nullspace(stack(cols), unknowns.len())
}

/// Rank of the kernel after keeping only unknowns whose arguments have
/// `|degree| <= k`.
pub fn core_rank<U>(kernel: &Dense, unknowns: &[U], keep: impl Fn(&U) -> bool) -> usize {
    let idx: Vec<usize> = (0..unknowns.len()).filter(|i| keep(&unknowns[*i])).collect();
    let rows: Dense = kernel
        .iter()
        .map(|v| idx.iter().map(|i| v[*i].clone()).collect())
        .collect();
    dense_rank(rows, idx.len())
}

pub fn in_core(s: &BasisSymbol, k: u32) -> bool {
    s.degree().unsigned_abs() <= k as u64
}

/// Center of the window: elements bracketing to zero with every window
/// symbol, computed densely.
pub fn brute_force_center(a: AlgebraSpec, n: u32) -> Vec<Element> {
    let syms = a.window_symbols(n);
    let cols: Vec<BTreeMap<(BasisSymbol, BasisSymbol), Scalar>> = syms
        .iter()
        .map(|s| {
            let mut col = BTreeMap::new();
            for e in &syms {
                for (out, x) in a.bracket_basis(*s, *e).unwrap().terms() {
                    col.insert((*e, *out), x.clone());
                }
            }
            col
        })
        .collect();
    dense_nullspace(stack(cols), syms.len())
        .into_iter()
        .map(|v| Element::from_terms(syms.iter().copied().zip(v)))
        .collect()
}
