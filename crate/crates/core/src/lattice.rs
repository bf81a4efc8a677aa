//! Exact integer and rational linear algebra in rank 2 and rank 3.
//!
//! Everything here is exact: lattice vectors are `i64` arrays, lengths and
//! positions are arbitrary-precision rationals.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Arbitrary precision rational, always kept in lowest terms.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rat(pub BigRational);

impl Rat {
    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn new(num: i64, den: i64) -> Self {
        Rat(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Self {
        Rat(self.0.abs())
    }

    pub fn recip(&self) -> Self {
        Rat(self.0.recip())
    }

    /// Integer value, if this rational is an integer fitting in `i64`.
    pub fn to_i64(&self) -> Option<i64> {
        use num_traits::ToPrimitive;
        if self.0.is_integer() {
            self.0.to_integer().to_i64()
        } else {
            None
        }
    }

    /// Lossy conversion, for rendering only.
    pub fn to_f64(&self) -> f64 {
        use num_traits::ToPrimitive;
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn mul_int(&self, k: i64) -> Self {
        self * &Rat::int(k)
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for Rat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let parse = |t: &str| {
            t.trim()
                .parse::<BigInt>()
                .map_err(|_| Error::Parse(format!("bad rational {s:?}")))
        };
        match s.split_once('/') {
            Some((n, d)) => {
                let d = parse(d)?;
                if d.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in {s:?}")));
                }
                Ok(Rat(BigRational::new(parse(n)?, d)))
            }
            None => Ok(Rat(BigRational::from_integer(parse(s)?))),
        }
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! rat_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<&Rat> for &Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat((&self.0).$m(&o.0))
            }
        }
        impl $tr<Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: Rat) -> Rat {
                Rat(self.0.$m(o.0))
            }
        }
        impl $tr<&Rat> for Rat {
            type Output = Rat;
            fn $m(self, o: &Rat) -> Rat {
                Rat(self.0.$m(&o.0))
            }
        }
    };
}
rat_binop!(Add, add);
rat_binop!(Sub, sub);
rat_binop!(Mul, mul);
rat_binop!(Div, div);

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0.clone())
    }
}

impl From<i64> for Rat {
    fn from(n: i64) -> Self {
        Rat::int(n)
    }
}

pub type Vec2i = [i64; 2];
pub type Vec3i = [i64; 3];
pub type Pt2 = [Rat; 2];
pub type Pt3 = [Rat; 3];

pub fn pt2(x: i64, y: i64) -> Pt2 {
    [Rat::int(x), Rat::int(y)]
}

pub fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, &x| g.gcd(&x))
}

/// Splits a nonzero lattice vector as `m * p` with `p` primitive and `m >= 1`.
pub fn primitive<const N: usize>(v: [i64; N]) -> Result<([i64; N], i64)> {
    let g = gcd_all(&v);
    if g == 0 {
        return Err(Error::ZeroVector);
    }
    Ok((v.map(|x| x / g), g))
}

pub fn is_primitive<const N: usize>(v: [i64; N]) -> bool {
    gcd_all(&v) == 1
}

/// Primitive direction and lattice length of a rational displacement.
///
/// Fails unless the displacement is a rational multiple of a lattice vector.
pub fn lattice_direction(d: &Pt2) -> Result<(Vec2i, Rat)> {
    rational_direction(d)
}

pub fn rational_direction<const N: usize>(d: &[Rat; N]) -> Result<([i64; N], Rat)> {
    if d.iter().all(Rat::is_zero) {
        return Err(Error::ZeroVector);
    }
    // clear denominators, then take the primitive part
    let lcm = d
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.0.denom()));
    let ints: Vec<BigInt> = d.iter().map(|x| (&x.0 * &lcm).to_integer()).collect();
    let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
    let mut out = [0i64; N];
    for (o, x) in out.iter_mut().zip(&ints) {
        use num_traits::ToPrimitive;
        *o = (x / &g)
            .to_i64()
            .ok_or_else(|| Error::Overflow("direction component".into()))?;
    }
    let len = Rat(BigRational::new(g, lcm));
    Ok((out, len))
}

pub fn det2(a: Vec2i, b: Vec2i) -> i64 {
    a[0] * b[1] - a[1] * b[0]
}

pub fn det2r(a: &Pt2, b: &Pt2) -> Rat {
    &a[0] * &b[1] - &a[1] * &b[0]
}

pub fn det3(a: Vec3i, b: Vec3i, c: Vec3i) -> i64 {
    a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0])
        + a[2] * (b[0] * c[1] - b[1] * c[0])
}

pub fn cross3(a: Vec3i, b: Vec3i) -> Vec3i {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn dot3(a: Vec3i, b: Vec3i) -> i64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn dot3r(a: Vec3i, x: &Pt3) -> Rat {
    x.iter()
        .zip(a)
        .fold(Rat::zero(), |acc, (xi, ai)| acc + xi.mul_int(ai))
}

pub fn sub2(a: &Pt2, b: &Pt2) -> Pt2 {
    [&a[0] - &b[0], &a[1] - &b[1]]
}

pub fn add2(a: &Pt2, b: &Pt2) -> Pt2 {
    [&a[0] + &b[0], &a[1] + &b[1]]
}

pub fn scale2(v: Vec2i, s: &Rat) -> Pt2 {
    [s.mul_int(v[0]), s.mul_int(v[1])]
}

pub fn sub3(a: &Pt3, b: &Pt3) -> Pt3 {
    [&a[0] - &b[0], &a[1] - &b[1], &a[2] - &b[2]]
}

pub fn lex_positive(v: Vec2i) -> Vec2i {
    if v[0] > 0 || (v[0] == 0 && v[1] > 0) {
        v
    } else {
        [-v[0], -v[1]]
    }
}

/// A 2×2 integer matrix with determinant ±1.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(try_from = "[[i64; 2]; 2]", into = "[[i64; 2]; 2]")]
pub struct UniMat2([[i64; 2]; 2]);

impl TryFrom<[[i64; 2]; 2]> for UniMat2 {
    type Error = Error;
    fn try_from(m: [[i64; 2]; 2]) -> Result<Self> {
        UniMat2::new(m)
    }
}

impl From<UniMat2> for [[i64; 2]; 2] {
    fn from(m: UniMat2) -> Self {
        m.0
    }
}

impl UniMat2 {
    pub const IDENTITY: UniMat2 = UniMat2([[1, 0], [0, 1]]);

    pub fn new(m: [[i64; 2]; 2]) -> Result<Self> {
        let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        if d.abs() != 1 {
            return Err(Error::NotUnimodular(format!("{m:?} has det {d}")));
        }
        Ok(UniMat2(m))
    }

    /// Matrix with the given columns.
    pub fn from_cols(a: Vec2i, b: Vec2i) -> Result<Self> {
        UniMat2::new([[a[0], b[0]], [a[1], b[1]]])
    }

    pub fn rows(&self) -> [[i64; 2]; 2] {
        self.0
    }

    pub fn col(&self, j: usize) -> Vec2i {
        [self.0[0][j], self.0[1][j]]
    }

    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn trace(&self) -> i64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn mul(&self, o: &UniMat2) -> UniMat2 {
        let a = self.0;
        let b = o.0;
        UniMat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn inverse(&self) -> UniMat2 {
        let d = self.det();
        let m = self.0;
        UniMat2([[m[1][1] * d, -m[0][1] * d], [-m[1][0] * d, m[0][0] * d]])
    }

    pub fn pow(&self, n: u32) -> UniMat2 {
        (0..n).fold(UniMat2::IDENTITY, |acc, _| acc.mul(self))
    }

    pub fn apply(&self, v: Vec2i) -> Vec2i {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn apply_r(&self, v: &Pt2) -> Pt2 {
        [
            v[0].mul_int(self.0[0][0]) + v[1].mul_int(self.0[0][1]),
            v[0].mul_int(self.0[1][0]) + v[1].mul_int(self.0[1][1]),
        ]
    }

    /// Row covector `c` pulled back: `c ∘ self`.
    pub fn pull_covector(&self, c: Vec2i) -> Vec2i {
        [
            c[0] * self.0[0][0] + c[1] * self.0[1][0],
            c[0] * self.0[0][1] + c[1] * self.0[1][1],
        ]
    }

    /// The node shear `x ↦ x − k·det(v, x)·v`, counterclockwise monodromy of a
    /// multiplicity-`k` node with eigen direction `v`.
    pub fn node_shear(v: Vec2i, k: i64) -> UniMat2 {
        // x - k v (v0 x1 - v1 x0)
        UniMat2([
            [1 + k * v[0] * v[1], -k * v[0] * v[0]],
            [k * v[1] * v[1], 1 - k * v[0] * v[1]],
        ])
    }
}

impl fmt::Display for UniMat2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{},{}],[{},{}]]",
            self.0[0][0], self.0[0][1], self.0[1][0], self.0[1][1]
        )
    }
}

/// GL(2,Z) conjugacy type of a unimodular matrix, as far as nodes care.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ShearClass {
    Identity,
    /// Conjugate to `[[1,k],[0,1]]`, `k > 0`; `axis` is the fixed direction,
    /// primitive and lexicographically positive.
    Shear { k: i64, axis: Vec2i },
    Other,
}

pub fn classify_shear(m: &UniMat2) -> ShearClass {
    if *m == UniMat2::IDENTITY {
        return ShearClass::Identity;
    }
    match signed_shear(m) {
        Some((k, axis)) => ShearClass::Shear {
            k: k.abs(),
            axis: lex_positive(axis),
        },
        None => ShearClass::Other,
    }
}

/// For a nontrivial unipotent `m`, returns `(k, v)` with
/// `m = node_shear(v, k)`; the sign of `k` is orientation dependent.
pub fn signed_shear(m: &UniMat2) -> Option<(i64, Vec2i)> {
    if m.det() != 1 || m.trace() != 2 || *m == UniMat2::IDENTITY {
        return None;
    }
    let r = m.rows();
    let n = [[r[0][0] - 1, r[0][1]], [r[1][0], r[1][1] - 1]];
    // image of the nilpotent part is its kernel, i.e. the fixed line
    let col = if n[0][0] != 0 || n[1][0] != 0 {
        [n[0][0], n[1][0]]
    } else {
        [n[0][1], n[1][1]]
    };
    let (v, _) = primitive(lex_positive(col)).ok()?;
    // pick u with det(v, u) = 1, then (m - I) u = -k v
    let u = unit_partner(v);
    let nu = [n[0][0] * u[0] + n[0][1] * u[1], n[1][0] * u[0] + n[1][1] * u[1]];
    let k = if v[0] != 0 { -nu[0] / v[0] } else { -nu[1] / v[1] };
    debug_assert_eq!(UniMat2::node_shear(v, k), *m);
    Some((k, v))
}

/// Some `u` with `det(v, u) = 1`, for primitive `v`.
pub fn unit_partner(v: Vec2i) -> Vec2i {
    let (g, x, y) = ext_gcd(v[0], v[1]);
    debug_assert_eq!(g.abs(), 1);
    // v0*x + v1*y = g; det(v,(−y,x)) = v0 x + v1 y
    [-y * g, x * g]
}

/// Extended Euclid: returns `(g, x, y)` with `a x + b y = g`.
pub fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        (a, 1, 0)
    } else {
        let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
        (g, y, x - a.div_euclid(b) * y)
    }
}

/// Affine map `x ↦ linear·x + translation` with unimodular linear part.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct AffineMap2 {
    pub linear: UniMat2,
    pub translation: Pt2,
}

impl AffineMap2 {
    pub fn identity() -> Self {
        AffineMap2 {
            linear: UniMat2::IDENTITY,
            translation: [Rat::zero(), Rat::zero()],
        }
    }

    pub fn new(linear: UniMat2, translation: Pt2) -> Self {
        AffineMap2 {
            linear,
            translation,
        }
    }

    /// The map `x ↦ center + linear (x − center)`.
    pub fn about(center: &Pt2, linear: UniMat2) -> Self {
        let t = sub2(center, &linear.apply_r(center));
        AffineMap2::new(linear, t)
    }

    /// Sends `src` to `dst` with the given linear part.
    pub fn mapping_point(linear: UniMat2, src: &Pt2, dst: &Pt2) -> Self {
        AffineMap2::new(linear, sub2(dst, &linear.apply_r(src)))
    }

    pub fn apply(&self, x: &Pt2) -> Pt2 {
        add2(&self.linear.apply_r(x), &self.translation)
    }

    /// `self ∘ o`
    pub fn compose(&self, o: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            linear: self.linear.mul(&o.linear),
            translation: self.apply(&o.translation),
        }
    }

    pub fn inverse(&self) -> AffineMap2 {
        let li = self.linear.inverse();
        let t = li.apply_r(&self.translation);
        AffineMap2 {
            linear: li,
            translation: [-&t[0], -&t[1]],
        }
    }

    pub fn is_identity(&self) -> bool {
        *self == AffineMap2::identity()
    }
}

/// A 3×3 integer matrix with determinant ±1, stored by rows.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct UniMat3(pub [[i64; 3]; 3]);

impl UniMat3 {
    pub fn col(&self, j: usize) -> Vec3i {
        [self.0[0][j], self.0[1][j], self.0[2][j]]
    }

    pub fn det(&self) -> i64 {
        det3(self.0[0], self.0[1], self.0[2])
    }

    /// Inverse via the adjugate (exact because det = ±1).
    pub fn inverse(&self) -> UniMat3 {
        let m = self.0;
        let d = self.det();
        let mut inv = [[0i64; 3]; 3];
        for (i, row) in inv.iter_mut().enumerate() {
            for (j, x) in row.iter_mut().enumerate() {
                let (r0, r1) = minor_idx(j);
                let (c0, c1) = minor_idx(i);
                let cof = m[r0][c0] * m[r1][c1] - m[r0][c1] * m[r1][c0];
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                *x = sign * cof * d;
            }
        }
        UniMat3(inv)
    }

    pub fn apply_r(&self, v: &Pt3) -> Pt3 {
        let row = |r: [i64; 3]| dot3r(r, v);
        [row(self.0[0]), row(self.0[1]), row(self.0[2])]
    }
}

fn minor_idx(k: usize) -> (usize, usize) {
    match k {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

/// Extends `vs` (columns, each of length `n`) to a unimodular `n × n` matrix
/// whose first columns are `vs`. Returned by rows.
pub fn complete_basis(vs: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let k = vs.len();
    if k == 0 {
        return Err(Error::InvalidInput("empty vector list".into()));
    }
    let n = vs[0].len();
    if vs.iter().any(|v| v.len() != n) || k > n {
        return Err(Error::InvalidInput("inconsistent dimensions".into()));
    }
    // Row-reduce V (n×k) with unimodular row operations: U V = H.
    let mut h: Vec<Vec<i128>> = (0..n)
        .map(|i| vs.iter().map(|v| v[i] as i128).collect())
        .collect();
    let mut u: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i128).collect())
        .collect();
    for c in 0..k {
        // Euclid down column c over rows c..n
        loop {
            let piv = (c..n)
                .filter(|&r| h[r][c] != 0)
                .min_by_key(|&r| h[r][c].abs());
            let Some(p) = piv else {
                return Err(not_saturated(vs, c));
            };
            h.swap(c, p);
            u.swap(c, p);
            let mut done = true;
            for r in c + 1..n {
                if h[r][c] != 0 {
                    let q = h[r][c].div_euclid(h[c][c]);
                    for j in 0..k {
                        h[r][j] -= q * h[c][j];
                    }
                    for j in 0..n {
                        u[r][j] -= q * u[c][j];
                    }
                    if h[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if h[c][c].abs() != 1 {
            return Err(not_saturated(vs, c));
        }
    }
    // V = U^{-1} H, H = [T; 0] with T upper triangular unimodular.
    let uinv = int_inverse(&u)?;
    let mut out = vec![vec![0i64; n]; n];
    for i in 0..n {
        for j in 0..n {
            let val: i128 = if j < k {
                (0..k).map(|l| uinv[i][l] * h[l][j]).sum()
            } else {
                uinv[i][j]
            };
            out[i][j] = i64::try_from(val).map_err(|_| Error::Overflow("basis".into()))?;
        }
    }
    Ok(out)
}

fn not_saturated(vs: &[Vec<i64>], col: usize) -> Error {
    Error::NotSaturated(format!(
        "columns {:?} do not extend to a lattice basis: leading {}×{} minor gcd is not 1",
        vs,
        col + 1,
        col + 1
    ))
}

/// Inverse of an integer matrix of determinant ±1 by Gauss–Jordan over Z.
fn int_inverse(m: &[Vec<i128>]) -> Result<Vec<Vec<i128>>> {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m.to_vec();
    let mut inv: Vec<Vec<i128>> = (0..n)
        .map(|i| (0..n).map(|j| (i == j) as i128).collect())
        .collect();
    for c in 0..n {
        loop {
            let piv = (c..n)
                .filter(|&r| a[r][c] != 0)
                .min_by_key(|&r| a[r][c].abs())
                .ok_or_else(|| Error::NotUnimodular("singular matrix".into()))?;
            a.swap(c, piv);
            inv.swap(c, piv);
            let mut done = true;
            for r in 0..n {
                if r != c && a[r][c] != 0 {
                    let q = a[r][c].div_euclid(a[c][c]);
                    for j in 0..n {
                        a[r][j] -= q * a[c][j];
                        inv[r][j] -= q * inv[c][j];
                    }
                    if a[r][c] != 0 {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if a[c][c].abs() != 1 {
            return Err(Error::NotUnimodular("determinant is not ±1".into()));
        }
        if a[c][c] == -1 {
            for j in 0..n {
                a[c][j] = -a[c][j];
                inv[c][j] = -inv[c][j];
            }
        }
    }
    Ok(inv)
}

pub fn complete_basis3(vs: &[Vec3i]) -> Result<UniMat3> {
    let cols: Vec<Vec<i64>> = vs.iter().map(|v| v.to_vec()).collect();
    let rows = complete_basis(&cols)?;
    Ok(UniMat3([
        [rows[0][0], rows[0][1], rows[0][2]],
        [rows[1][0], rows[1][1], rows[1][2]],
        [rows[2][0], rows[2][1], rows[2][2]],
    ]))
}

/// Row-style Hermite normal form of a `2 × 3` integer matrix; rows span the
/// same lattice. Unique for a given lattice.
pub fn hermite_rows(rows: [Vec3i; 2]) -> [Vec3i; 2] {
    let mut m = rows;
    let mut r = 0usize;
    for c in 0..3 {
        if r == 2 {
            break;
        }
        loop {
            let piv = (r..2).filter(|&i| m[i][c] != 0).min_by_key(|&i| m[i][c].abs());
            let Some(p) = piv else { break };
            m.swap(r, p);
            let mut done = true;
            for i in r + 1..2 {
                if m[i][c] != 0 {
                    let q = m[i][c].div_euclid(m[r][c]);
                    for j in 0..3 {
                        m[i][j] -= q * m[r][j];
                    }
                    done &= m[i][c] == 0;
                }
            }
            if done {
                break;
            }
        }
        if m[r][c] != 0 {
            if m[r][c] < 0 {
                m[r] = m[r].map(|x| -x);
            }
            for i in 0..r {
                let q = m[i][c].div_euclid(m[r][c]);
                for j in 0..3 {
                    m[i][j] -= q * m[r][j];
                }
            }
            r += 1;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primitive_examples() {
        assert_eq!(primitive([2, 4, 6]).unwrap(), ([1, 2, 3], 2));
        assert_eq!(primitive([0, 0, 5]).unwrap(), ([0, 0, 1], 5));
        assert_eq!(primitive([3, -6, 2]).unwrap(), ([3, -6, 2], 1));
        assert!(matches!(primitive([0, 0, 0]), Err(Error::ZeroVector)));
    }

    #[test]
    fn complete_basis_examples() {
        let m = complete_basis3(&[[1, 0, 0]]).unwrap();
        assert_eq!(m.col(0), [1, 0, 0]);
        assert_eq!(m.det().abs(), 1);
        let m = complete_basis3(&[[1, 1, 0]]).unwrap();
        assert_eq!(m.col(0), [1, 1, 0]);
        assert_eq!(m.det().abs(), 1);
        assert!(matches!(
            complete_basis3(&[[2, 0, 0]]),
            Err(Error::NotSaturated(_))
        ));
        // jointly non-saturated pair: (1,1,0),(1,-1,0) span index 2
        assert!(complete_basis3(&[[1, 1, 0], [1, -1, 0]]).is_err());
        let m = complete_basis3(&[[1, 1, 0], [0, 1, 1]]).unwrap();
        assert_eq!((m.col(0), m.col(1)), ([1, 1, 0], [0, 1, 1]));
    }

    #[test]
    fn hnf_oracle_agrees_on_completion() {
        // Oracle: the HNF of the first column's span is the column itself when
        // primitive, and the completed matrix has an integral inverse.
        for v in [[1, 1, 0], [3, 5, 7], [-2, 3, 0], [0, 4, 9]] {
            let m = complete_basis3(&[v]).unwrap();
            let inv = m.inverse();
            let prod: Vec<i64> = (0..3)
                .map(|i| (0..3).map(|l| inv.0[i][l] * m.0[l][0]).sum())
                .collect();
            assert_eq!(prod, vec![1, 0, 0]);
        }
    }

    #[test]
    fn classify_examples() {
        let s = UniMat2::new([[1, 1], [0, 1]]).unwrap();
        assert_eq!(classify_shear(&s), ShearClass::Shear { k: 1, axis: [1, 0] });
        assert_eq!(classify_shear(&UniMat2::IDENTITY), ShearClass::Identity);
        let m = UniMat2::new([[0, 1], [-1, 2]]).unwrap();
        assert_eq!(classify_shear(&m), ShearClass::Shear { k: 1, axis: [1, 1] });
        // conjugation oracle for the example above
        let c = UniMat2::new([[1, 0], [1, 1]]).unwrap();
        assert_eq!(c.mul(&s).mul(&c.inverse()), m);
        let rot = UniMat2::new([[0, -1], [1, 0]]).unwrap();
        assert_eq!(classify_shear(&rot), ShearClass::Other);
        let neg = UniMat2::new([[-1, 1], [0, -1]]).unwrap();
        assert_eq!(classify_shear(&neg), ShearClass::Other);
    }

    #[test]
    fn node_shear_sign_convention() {
        // horizontal eigenline, face above: [[1,-k],[0,1]]
        assert_eq!(UniMat2::node_shear([1, 0], 2).rows(), [[1, -2], [0, 1]]);
        assert_eq!(UniMat2::node_shear([-1, 0], 2).rows(), [[1, -2], [0, 1]]);
        assert_eq!(signed_shear(&UniMat2::node_shear([2, 3], 3)), Some((3, [2, 3])));
    }

    #[test]
    fn rat_parse_and_print() {
        let r: Rat = "6/4".parse().unwrap();
        assert_eq!(r.to_string(), "3/2");
        assert_eq!("-7".parse::<Rat>().unwrap(), Rat::int(-7));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("x".parse::<Rat>().is_err());
    }

    #[test]
    fn affine_inverse_roundtrip() {
        let a = AffineMap2::new(UniMat2::new([[2, 1], [1, 1]]).unwrap(), [Rat::new(1, 3), Rat::int(-2)]);
        assert!(a.compose(&a.inverse()).is_identity());
        let p = [Rat::new(5, 7), Rat::int(3)];
        assert_eq!(a.inverse().apply(&a.apply(&p)), p);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn unimat() -> impl Strategy<Value = UniMat2> {
            // products of elementary generators
            prop::collection::vec(0u8..4, 0..8).prop_map(|gens| {
                let g = [
                    UniMat2::new([[1, 1], [0, 1]]).unwrap(),
                    UniMat2::new([[1, 0], [1, 1]]).unwrap(),
                    UniMat2::new([[0, 1], [1, 0]]).unwrap(),
                    UniMat2::new([[1, -1], [0, 1]]).unwrap(),
                ];
                gens.iter().fold(UniMat2::IDENTITY, |acc, &i| acc.mul(&g[i as usize]))
            })
        }

        proptest! {
            #[test]
            fn primitive_scaling(p in (-50i64..50, -50i64..50, -50i64..50), m in 1i64..20) {
                prop_assume!(p != (0, 0, 0));
                let (q, _) = primitive([p.0, p.1, p.2]).unwrap();
                let scaled = q.map(|x| x * m);
                prop_assert_eq!(primitive(scaled).unwrap(), (q, m));
            }

            #[test]
            fn shear_conjugation_invariant(c in unimat(), k in 1i64..6) {
                let s = UniMat2::new([[1, k], [0, 1]]).unwrap();
                let conj = c.mul(&s).mul(&c.inverse());
                let axis = lex_positive(c.apply([1, 0]));
                prop_assert_eq!(classify_shear(&conj), ShearClass::Shear { k, axis });
            }

            #[test]
            fn shear_additivity(c in unimat(), k1 in 1i64..5, k2 in 1i64..5) {
                let v = c.apply([1, 0]);
                let s1 = UniMat2::node_shear(v, k1);
                let s2 = UniMat2::node_shear(v, k2);
                prop_assert_eq!(
                    classify_shear(&s1.mul(&s2)),
                    ShearClass::Shear { k: k1 + k2, axis: lex_positive(v) }
                );
            }
        }
    }
}
