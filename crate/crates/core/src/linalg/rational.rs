//! Exact rank over the rationals by fraction-free sparse column reduction.
//!
//! Columns are reduced against earlier columns sharing the same lowest
//! nonzero row, using `c ← a·c − b·p` and then dividing out the content gcd.
//! Coefficients live in `i128` with checked arithmetic; on overflow the whole
//! reduction is redone with arbitrary-precision integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

type Column<T> = Vec<(usize, T)>;

trait Coeff: Clone + PartialEq + Sized {
    fn is_zero(&self) -> bool;
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self>;
    fn gcd(&self, other: &Self) -> Self;
    fn div_exact(&self, d: &Self) -> Self;
    fn abs(&self) -> Self;
    fn is_one(&self) -> bool;
}

impl Coeff for i128 {
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        a.checked_mul(*x)?.checked_sub(b.checked_mul(*y)?)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn abs(&self) -> Self {
        i128::abs(*self)
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
}

impl Coeff for BigInt {
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn combine(a: &Self, x: &Self, b: &Self, y: &Self) -> Option<Self> {
        Some(a * x - b * y)
    }
    fn gcd(&self, other: &Self) -> Self {
        Integer::gcd(self, other)
    }
    fn div_exact(&self, d: &Self) -> Self {
        self / d
    }
    fn abs(&self) -> Self {
        Signed::abs(self)
    }
    fn is_one(&self) -> bool {
        *self == BigInt::from(1)
    }
}

/// `a·x − b·y` for sparse columns sorted by row.
fn axpy<T: Coeff>(a: &T, x: &Column<T>, b: &T, y: &Column<T>) -> Option<Column<T>> {
    let zero_like = |v: &T| -> T {
        // v·0 without requiring a Zero bound
        T::combine(v, v, v, v).expect("v*v - v*v cannot overflow when v*v does not")
    };
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let v = match (x.get(i), y.get(j)) {
            (Some(&(ri, ref xi)), Some(&(rj, _))) if ri < rj => {
                i += 1;
                (ri, T::combine(a, xi, b, &zero_like(b))?)
            }
            (Some(&(ri, _)), Some(&(rj, ref yj))) if rj < ri => {
                j += 1;
                (rj, T::combine(a, &zero_like(a), b, yj)?)
            }
            (Some(&(ri, ref xi)), Some((_, yj))) => {
                i += 1;
                j += 1;
                (ri, T::combine(a, xi, b, yj)?)
            }
            (Some(&(ri, ref xi)), None) => {
                i += 1;
                (ri, T::combine(a, xi, b, &zero_like(b))?)
            }
            (None, Some(&(rj, ref yj))) => {
                j += 1;
                (rj, T::combine(a, &zero_like(a), b, yj)?)
            }
            (None, None) => unreachable!(),
        };
        if !v.1.is_zero() {
            out.push(v);
        }
    }
    Some(out)
}

fn normalize<T: Coeff>(col: &mut Column<T>) {
    let Some(first) = col.first() else { return };
    let mut g = first.1.abs();
    for (_, v) in col.iter().skip(1) {
        if g.is_one() {
            return;
        }
        g = g.gcd(v);
    }
    if !g.is_one() {
        for (_, v) in col.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
}

fn reduce<T: Coeff>(nrows: usize, columns: Vec<Column<T>>) -> Option<usize> {
    let mut pivots: Vec<Option<Column<T>>> = vec![None; nrows];
    let mut rank = 0;
    for mut col in columns {
        while let Some((low, lc)) = col.last().cloned() {
            match &pivots[low] {
                Some(p) => {
                    let pc = &p.last().expect("pivot columns are nonzero").1;
                    let g = pc.gcd(&lc);
                    let (a, b) = (pc.div_exact(&g), lc.div_exact(&g));
                    col = axpy(&a, &col, &b, p)?;
                    normalize(&mut col);
                }
                None => {
                    pivots[low] = Some(col);
                    rank += 1;
                    break;
                }
            }
        }
    }
    Some(rank)
}

/// Rank over ℚ of an integer matrix given as sparse columns (entries sorted by row).
pub fn rank_of_columns<'a, I>(nrows: usize, columns: I) -> usize
where
    I: IntoIterator<Item = &'a [(usize, i64)]>,
{
    let columns: Vec<&[(usize, i64)]> = columns.into_iter().collect();
    let small: Vec<Column<i128>> = columns
        .iter()
        .map(|c| {
            c.iter()
                .filter(|(_, v)| *v != 0)
                .map(|&(r, v)| (r, v as i128))
                .collect()
        })
        .collect();
    if let Some(r) = reduce(nrows, small) {
        return r;
    }
    let big: Vec<Column<BigInt>> = columns
        .iter()
        .map(|c| {
            c.iter()
                .filter(|(_, v)| *v != 0)
                .map(|&(r, v)| (r, BigInt::from(v)))
                .collect()
        })
        .collect();
    reduce(nrows, big).expect("arbitrary precision cannot overflow")
}
