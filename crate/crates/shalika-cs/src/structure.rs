//! Exact matrix algebra over `E = F(delta)`, the factorization identities
//! used in the step-factor computations, the torus map of the exceptional
//! isomorphism, stabilizer membership for the Mackey orbits, and numeric
//! p-adic quadrature for the two period integrals.
//!
//! Scalars of `F` are [`RationalFn`]s, so the same code handles numeric
//! values and fully symbolic ones (including a symbolic `d = delta^2`).

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::exactalg::{int, AlgError, Rational, RationalFn};
use crate::satake::{konst, ARITY};
use crate::theta::{OrbitEntry, Stabilizer};

/// Errors from structural checks and the p-adic oracle.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum StructError {
    #[error("excluded locus: {0}")]
    Excluded(String),
    #[error("element is not invertible: {0}")]
    NotInvertible(String),
    #[error("p = {0} must be an odd prime")]
    BadPrime(u64),
    #[error("integral diverges for these parameters: {0}")]
    Divergent(String),
    #[error("factorization index must be 1 or 2, got {0}")]
    BadFactorizationIndex(u8),
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// Element `a + b delta` of `E = F(delta)` with `delta^2 = d`.
#[derive(Debug, Clone)]
pub struct QuadExtScalar {
    pub a: RationalFn,
    pub b: RationalFn,
    pub d: RationalFn,
}

impl QuadExtScalar {
    pub fn new(a: RationalFn, b: RationalFn, d: RationalFn) -> Self {
        QuadExtScalar { a, b, d }
    }

    /// An element of `F`.
    pub fn from_f(a: RationalFn, d: &RationalFn) -> Self {
        QuadExtScalar { a, b: RationalFn::zero(ARITY), d: d.clone() }
    }

    pub fn rational(a: Rational, b: Rational, d: &RationalFn) -> Self {
        QuadExtScalar { a: konst(a), b: konst(b), d: d.clone() }
    }

    pub fn zero(d: &RationalFn) -> Self {
        Self::from_f(RationalFn::zero(ARITY), d)
    }

    pub fn one(d: &RationalFn) -> Self {
        Self::from_f(RationalFn::one(ARITY), d)
    }

    /// The element `delta`.
    pub fn delta(d: &RationalFn) -> Self {
        QuadExtScalar { a: RationalFn::zero(ARITY), b: RationalFn::one(ARITY), d: d.clone() }
    }

    pub fn conj(&self) -> Self {
        QuadExtScalar { a: self.a.clone(), b: -&self.b, d: self.d.clone() }
    }

    /// `N(x) = a^2 - d b^2`.
    pub fn norm(&self) -> RationalFn {
        &(&self.a * &self.a) - &(&self.d * &(&self.b * &self.b))
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// True when the `delta` component vanishes.
    pub fn in_base_field(&self) -> bool {
        self.b.is_zero()
    }

    pub fn inverse(&self) -> Result<Self, StructError> {
        let n = self.norm();
        if n.is_zero() {
            return Err(StructError::NotInvertible("zero norm".into()));
        }
        let c = self.conj();
        Ok(QuadExtScalar { a: c.a.checked_div(&n)?, b: c.b.checked_div(&n)?, d: self.d.clone() })
    }

    pub fn scale(&self, c: &RationalFn) -> Self {
        QuadExtScalar { a: &self.a * c, b: &self.b * c, d: self.d.clone() }
    }
}

impl PartialEq for QuadExtScalar {
    fn eq(&self, o: &Self) -> bool {
        self.a == o.a && self.b == o.b
    }
}

impl Add for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn add(self, o: &QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar { a: &self.a + &o.a, b: &self.b + &o.b, d: self.d.clone() }
    }
}

impl Sub for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn sub(self, o: &QuadExtScalar) -> QuadExtScalar {
        QuadExtScalar { a: &self.a - &o.a, b: &self.b - &o.b, d: self.d.clone() }
    }
}

impl Mul for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn mul(self, o: &QuadExtScalar) -> QuadExtScalar {
        let a = &(&self.a * &o.a) + &(&self.d * &(&self.b * &o.b));
        let b = &(&self.a * &o.b) + &(&o.a * &self.b);
        QuadExtScalar { a, b, d: self.d.clone() }
    }
}

impl Neg for &QuadExtScalar {
    type Output = QuadExtScalar;
    fn neg(self) -> QuadExtScalar {
        QuadExtScalar { a: -&self.a, b: -&self.b, d: self.d.clone() }
    }
}

/// Square matrix over `E`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: Vec<Vec<QuadExtScalar>>,
}

impl Mat {
    pub fn zero(n: usize, d: &RationalFn) -> Self {
        Mat { rows: vec![vec![QuadExtScalar::zero(d); n]; n] }
    }

    pub fn identity(n: usize, d: &RationalFn) -> Self {
        let mut m = Self::zero(n, d);
        for i in 0..n {
            m.rows[i][i] = QuadExtScalar::one(d);
        }
        m
    }

    pub fn diag(entries: Vec<QuadExtScalar>) -> Self {
        let d = entries[0].d.clone();
        let n = entries.len();
        let mut m = Self::zero(n, &d);
        for (i, e) in entries.into_iter().enumerate() {
            m.rows[i][i] = e;
        }
        m
    }

    /// Matrix with small integer entries, `delta` entries given separately.
    pub fn from_ints(entries: &[&[i64]], d: &RationalFn) -> Self {
        Mat {
            rows: entries
                .iter()
                .map(|r| r.iter().map(|&x| QuadExtScalar::rational(int(x), int(0), d)).collect())
                .collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        let n = self.n();
        let d = self.rows[0][0].d.clone();
        let mut out = Mat::zero(n, &d);
        for i in 0..n {
            for j in 0..n {
                let mut acc = QuadExtScalar::zero(&d);
                for k in 0..n {
                    if self.rows[i][k].is_zero() || o.rows[k][j].is_zero() {
                        continue;
                    }
                    acc = &acc + &(&self.rows[i][k] * &o.rows[k][j]);
                }
                out.rows[i][j] = acc;
            }
        }
        out
    }

    pub fn transpose(&self) -> Mat {
        let n = self.n();
        let mut out = self.clone();
        for i in 0..n {
            for j in 0..n {
                out.rows[i][j] = self.rows[j][i].clone();
            }
        }
        out
    }

    pub fn conj(&self) -> Mat {
        Mat { rows: self.rows.iter().map(|r| r.iter().map(|x| x.conj()).collect()).collect() }
    }

    pub fn scale(&self, c: &QuadExtScalar) -> Mat {
        Mat { rows: self.rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect() }
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.n();
        (0..n).all(|i| (0..i).all(|j| self.rows[i][j].is_zero()))
    }
}

/// `J = [[0, J2], [-J2, 0]]` with `J2 = [[0, 1], [1, 0]]`.
pub fn form_j(d: &RationalFn) -> Mat {
    Mat::from_ints(&[&[0, 0, 0, 1], &[0, 0, 1, 0], &[0, -1, 0, 0], &[-1, 0, 0, 0]], d)
}

/// The similitude factor `m` with `conj(g)^t J g = m J`, if `g` is a unitary similitude.
pub fn unitary_similitude(g: &Mat) -> Option<RationalFn> {
    let d = g.rows[0][0].d.clone();
    let j = form_j(&d);
    let lhs = g.conj().transpose().mul(&j).mul(g);
    let m = lhs.rows[0][3].clone();
    if !m.in_base_field() || m.is_zero() {
        return None;
    }
    if lhs == j.scale(&m) {
        Some(m.a)
    } else {
        None
    }
}

/// Matrix of the simple reflection `s1`.
pub fn mat_s1(d: &RationalFn) -> Mat {
    Mat::from_ints(&[&[0, 1, 0, 0], &[1, 0, 0, 0], &[0, 0, 0, 1], &[0, 0, 1, 0]], d)
}

/// Matrix of the simple reflection `s2`.
pub fn mat_s2(d: &RationalFn) -> Mat {
    Mat::from_ints(&[&[1, 0, 0, 0], &[0, 0, 1, 0], &[0, -1, 0, 0], &[0, 0, 0, 1]], d)
}

/// `w_delta` with lower entries `delta` and `-conj(delta) = delta`.
pub fn mat_w_delta(d: &RationalFn, inverse: bool) -> Mat {
    let mut m = Mat::identity(4, d);
    let mut del = QuadExtScalar::delta(d);
    if inverse {
        del = -&del;
    }
    m.rows[1][0] = del.clone();
    m.rows[3][2] = -&del.conj();
    m
}

/// Representative `w * w~` of an orbit and its inverse.
pub fn orbit_representative(orbit: &OrbitEntry, d: &RationalFn) -> (Mat, Mat) {
    let mut rep = Mat::identity(4, d);
    let mut inv = Mat::identity(4, d);
    if orbit.with_w_delta {
        rep = mat_w_delta(d, false);
        inv = mat_w_delta(d, true);
    }
    for &g in &orbit.kostant {
        let (m, mi) = if g == 1 {
            (mat_s1(d), mat_s1(d).transpose())
        } else {
            (mat_s2(d), mat_s2(d).transpose())
        };
        rep = rep.mul(&m);
        inv = mi.mul(&inv);
    }
    (rep, inv)
}

/// Shalika-subgroup image of `[[a, b], [c, e]]` in GL2(F):
/// `diag(h, [[a, -b], [-c, e]])`.
pub fn shalika_levi(a: &RationalFn, b: &RationalFn, c: &RationalFn, e: &RationalFn, d: &RationalFn) -> Mat {
    let f = |x: &RationalFn| QuadExtScalar::from_f(x.clone(), d);
    let mut m = Mat::zero(4, d);
    m.rows[0][0] = f(a);
    m.rows[0][1] = f(b);
    m.rows[1][0] = f(c);
    m.rows[1][1] = f(e);
    m.rows[2][2] = f(a);
    m.rows[2][3] = f(&-b);
    m.rows[3][2] = f(&-c);
    m.rows[3][3] = f(e);
    m
}

/// Unipotent `[[I, X], [0, I]]` with `X = [[alpha, x], [y, conj(alpha)]]`.
pub fn shalika_unipotent(alpha: &QuadExtScalar, x: &RationalFn, y: &QuadExtScalar) -> Mat {
    let d = alpha.d.clone();
    let mut m = Mat::identity(4, &d);
    m.rows[0][2] = alpha.clone();
    m.rows[0][3] = QuadExtScalar::from_f(x.clone(), &d);
    m.rows[1][2] = y.clone();
    m.rows[1][3] = alpha.conj();
    m
}

/// Random element of an orbit stabilizer built from its generator recipe.
pub fn stabilizer_sample<R: Rng>(orbit: &OrbitEntry, d: &RationalFn, rng: &mut R) -> Mat {
    let mut r = || konst(crate::exactalg::rat(rng.gen_range(1..20) * if rng.gen_bool(0.5) { 1 } else { -1 }, rng.gen_range(1..9)));
    let (a, b, e, x, al_a, al_b) = (r(), r(), r(), r(), r(), r());
    let zero = RationalFn::zero(ARITY);
    let alpha = QuadExtScalar::new(al_a, al_b, d.clone());
    let del = QuadExtScalar::delta(d);
    let xf = QuadExtScalar::from_f(x.clone(), d);
    let borel = shalika_levi(&a, &b, &zero, &e, d);
    let torus = shalika_levi(&a, &b, &(&b * d), &a, d);
    let zq = QuadExtScalar::zero(d);
    match orbit.stabilizer {
        Stabilizer::BorelFullUnipotent => borel.mul(&shalika_unipotent(&alpha, &x, &QuadExtScalar::from_f(e.clone(), d))),
        Stabilizer::BorelUnipotentS2 => borel.mul(&shalika_unipotent(&alpha, &x, &zq)),
        Stabilizer::BorelUnipotentS2S1 => borel.mul(&shalika_unipotent(&zq, &x, &zq)),
        Stabilizer::Borel => borel,
        Stabilizer::TorusFullUnipotent => torus.mul(&shalika_unipotent(&alpha, &x, &QuadExtScalar::from_f(e.clone(), d))),
        Stabilizer::TorusUnipotentS2 => {
            // y = delta alpha + conj(delta alpha) - delta conj(delta) x
            let da = &del * &alpha;
            let y = &(&da + &da.conj()) - &(&(&del * &del.conj()) * &xf);
            torus.mul(&shalika_unipotent(&alpha, &x, &y))
        }
        Stabilizer::TorusUnipotentS2S1 => {
            let al = &del.conj() * &xf;
            let y = &(&del * &del.conj()) * &xf;
            torus.mul(&shalika_unipotent(&al, &x, &y))
        }
        Stabilizer::Torus => torus,
    }
}

/// Checks that `rep^{-1} sample rep` is upper triangular and that `sample`
/// is a unitary similitude.
pub fn stabilizer_check(orbit: &OrbitEntry, sample: &Mat) -> Result<bool, StructError> {
    if sample.n() != 4 {
        return Err(StructError::NotInvertible("sample must be 4x4".into()));
    }
    let d = sample.rows[0][0].d.clone();
    let (rep, inv) = orbit_representative(orbit, &d);
    let conj = inv.mul(sample).mul(&rep);
    Ok(conj.is_upper_triangular() && unitary_similitude(sample).is_some())
}

/// Verifies one of the two factorization identities of the step-factor
/// computation, multiplying the right-hand side out exactly.
///
/// `which = 1` needs `y` in `F`, `y != 0`; `which = 2` needs `y conj(y) + b_y != 0`.
pub fn lemfact1_check(which: u8, y: &QuadExtScalar) -> Result<bool, StructError> {
    let d = y.d.clone();
    let one = QuadExtScalar::one(&d);
    let zero = QuadExtScalar::zero(&d);
    match which {
        1 => {
            if y.is_zero() {
                return Err(StructError::Excluded("y = 0".into()));
            }
            let yi = y.inverse()?;
            let lhs = Mat {
                rows: vec![
                    vec![one.clone(), zero.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), one.clone(), zero.clone()],
                    vec![zero.clone(), -&one, -y, zero.clone()],
                    vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
                ],
            };
            let a = Mat {
                rows: vec![
                    vec![one.clone(), zero.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), -&yi, one.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), -y, zero.clone()],
                    vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
                ],
            };
            let b = Mat {
                rows: vec![
                    vec![one.clone(), zero.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), one.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), yi, one.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
                ],
            };
            Ok(a.mul(&b) == lhs)
        }
        2 => {
            let yb = y.conj();
            let by = QuadExtScalar::from_f(y.b.clone(), &d);
            let dd = &(y * &yb) + &by;
            if dd.is_zero() {
                return Err(StructError::Excluded("y conj(y) + b_y = 0".into()));
            }
            let di = dd.inverse()?;
            let lhs = Mat {
                rows: vec![
                    vec![zero.clone(), one.clone(), zero.clone(), zero.clone()],
                    vec![one.clone(), y.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), zero.clone(), one.clone()],
                    vec![zero.clone(), zero.clone(), one.clone(), -&yb],
                ],
            };
            let a = Mat {
                rows: vec![
                    vec![-&di, &yb * &di, zero.clone(), zero.clone()],
                    vec![zero.clone(), one.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), di.clone(), y * &di],
                    vec![zero.clone(), zero.clone(), zero.clone(), -&one],
                ],
            };
            let b = Mat {
                rows: vec![
                    vec![yb.clone(), -&by, zero.clone(), zero.clone()],
                    vec![one.clone(), y.clone(), zero.clone(), zero.clone()],
                    vec![zero.clone(), zero.clone(), y.clone(), by.clone()],
                    vec![zero.clone(), zero.clone(), -&one, yb.clone()],
                ],
            };
            Ok(a.mul(&b) == lhs)
        }
        other => Err(StructError::BadFactorizationIndex(other)),
    }
}

/// The element `v(x1, .., x6)` of the six-dimensional space.
pub fn v_matrix(x: &[RationalFn; 6], d: &RationalFn) -> Mat {
    let f = |r: &RationalFn| QuadExtScalar::from_f(r.clone(), d);
    let z = QuadExtScalar::new(x[2].clone(), x[3].clone(), d.clone());
    let zb = z.conj();
    let zero = QuadExtScalar::zero(d);
    Mat {
        rows: vec![
            vec![zero.clone(), -&f(&x[0]), f(&x[1]), -&zb],
            vec![f(&x[0]), zero.clone(), z.clone(), f(&x[4])],
            vec![-&f(&x[1]), -&z, zero.clone(), f(&x[5])],
            vec![zb, -&f(&x[4]), -&f(&x[5]), zero],
        ],
    }
}

/// Reads the coordinates back from an element of the six-dimensional space,
/// or `None` when the matrix is not of that shape.
pub fn v_coords(m: &Mat) -> Option<[RationalFn; 6]> {
    let d = m.rows[0][0].d.clone();
    let x1 = m.rows[1][0].clone();
    let x2 = m.rows[0][2].clone();
    let z = m.rows[1][2].clone();
    let x5 = m.rows[1][3].clone();
    let x6 = m.rows[2][3].clone();
    if ![&x1, &x2, &x5, &x6].iter().all(|x| x.in_base_field()) {
        return None;
    }
    let coords = [x1.a, x2.a, z.a, z.b, x5.a, x6.a];
    if v_matrix(&coords, &d) == *m {
        Some(coords)
    } else {
        None
    }
}

/// Matrix (6x6 over `F`, column `i` = image of `v_i`) of the action of the
/// lift of `diag(a, b, nu/conj(b), nu/conj(a))` on the six-dimensional space.
///
/// The lift is `(g, alpha)` with `alpha = ab` and `g = t r_alpha^{-1}`, which
/// has determinant `nu^2 = m_g^2`; the action is `v -> conj(alpha) g r_alpha v r_alpha g^t`.
pub fn excep_iso_matrix(a: &QuadExtScalar, b: &QuadExtScalar, nu: &RationalFn) -> Result<Vec<Vec<RationalFn>>, StructError> {
    let d = a.d.clone();
    let nuq = QuadExtScalar::from_f(nu.clone(), &d);
    let t = Mat::diag(vec![
        a.clone(),
        b.clone(),
        &nuq * &b.conj().inverse()?,
        &nuq * &a.conj().inverse()?,
    ]);
    let alpha = a * b;
    let r = Mat::diag(vec![alpha.clone(), QuadExtScalar::one(&d), QuadExtScalar::one(&d), alpha.conj().inverse()?]);
    let rinv = Mat::diag(vec![alpha.inverse()?, QuadExtScalar::one(&d), QuadExtScalar::one(&d), alpha.conj()]);
    let g = t.mul(&rinv);
    let left = g.mul(&r);
    let right = r.mul(&g.transpose());
    let ab = alpha.conj();
    let mut cols = Vec::with_capacity(6);
    for i in 0..6 {
        let mut e: [RationalFn; 6] = std::array::from_fn(|_| RationalFn::zero(ARITY));
        e[i] = RationalFn::one(ARITY);
        let img = left.mul(&v_matrix(&e, &d)).mul(&right).scale(&ab);
        let c = v_coords(&img).ok_or_else(|| StructError::NotInvertible("image left the space".into()))?;
        cols.push(c.to_vec());
    }
    // Transpose columns into rows.
    Ok((0..6).map(|i| (0..6).map(|j| cols[j][i].clone()).collect()).collect())
}

/// The matrix displayed for the torus map: `diag(N(ab), nu N(a), [nu conj(a) b], nu N(b), nu^2)`,
/// where the bracket is multiplication by `nu conj(a) b` on the `(x3, x4)` plane.
pub fn excep_iso_expected(a: &QuadExtScalar, b: &QuadExtScalar, nu: &RationalFn) -> Vec<Vec<RationalFn>> {
    let d = a.d.clone();
    let z = (&a.conj() * b).scale(nu);
    let mut m = vec![vec![RationalFn::zero(ARITY); 6]; 6];
    m[0][0] = (a * b).norm();
    m[1][1] = nu * &a.norm();
    m[2][2] = z.a.clone();
    m[2][3] = &d * &z.b;
    m[3][2] = z.b.clone();
    m[3][3] = z.a.clone();
    m[4][4] = nu * &b.norm();
    m[5][5] = nu * nu;
    m
}

/// Compares the computed torus action with the displayed one up to a scalar.
pub fn excep_iso_check(a: &QuadExtScalar, b: &QuadExtScalar, nu: &RationalFn) -> Result<bool, StructError> {
    if a.is_zero() || b.is_zero() || nu.is_zero() {
        return Err(StructError::NotInvertible("a, b and nu must be nonzero".into()));
    }
    let got = excep_iso_matrix(a, b, nu)?;
    let want = excep_iso_expected(a, b, nu);
    let c = got[5][5].checked_div(&want[5][5])?;
    Ok((0..6).all(|i| (0..6).all(|j| got[i][j] == &c * &want[i][j])))
}

/// Numeric p-adic sampler: residue characteristic `p`, coset depth `depth`,
/// and the non-square unit `d`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PadicSampler {
    pub p: u64,
    pub depth: u32,
    pub d: u64,
}

impl PadicSampler {
    /// Uses the smallest positive quadratic non-residue modulo `p` for `d`.
    pub fn new(p: u64, depth: u32) -> Result<Self, StructError> {
        if p < 3 || p % 2 == 0 || !(2..p).take_while(|k| k * k <= p).all(|k| p % k != 0) {
            return Err(StructError::BadPrime(p));
        }
        let d = (2..p).find(|&x| pow_mod(x, (p - 1) / 2, p) == p - 1).expect("odd prime has a non-residue");
        Ok(PadicSampler { p, depth, d })
    }

    /// `psi(x) = exp(2 pi i {x})` for `x = num / p^j` with `num` an integer.
    pub fn psi(&self, num: i128, j: u32) -> (f64, f64) {
        let m = (self.p as i128).pow(j);
        let frac = num.rem_euclid(m) as f64 / m as f64;
        let ang = 2.0 * PI * frac;
        (ang.cos(), ang.sin())
    }
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % m as u128) as u64;
        }
        b = (b as u128 * b as u128 % m as u128) as u64;
        e >>= 1;
    }
    r
}

fn inv_mod(a: i128, m: i128) -> i128 {
    let (mut old_r, mut r) = (a.rem_euclid(m), m);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let qt = old_r / r;
        (old_r, r) = (r, old_r - qt * r);
        (old_s, s) = (s, old_s - qt * s);
    }
    old_s.rem_euclid(m)
}

/// Result of a numeric period integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PadicEstimate {
    pub re: f64,
    pub im: f64,
    /// Upper bound on the neglected shells.
    pub tail_bound: f64,
    pub target: f64,
}

impl PadicEstimate {
    pub fn error(&self) -> f64 {
        ((self.re - self.target).powi(2) + self.im.powi(2)).sqrt()
    }
}

/// Closed form `1 - 1/q - q^{-(2 z2 + 1)}`.
pub fn comp1_closed(q: f64, z2: f64) -> f64 {
    1.0 - 1.0 / q - q.powf(-(2.0 * z2 + 1.0))
}

/// `int_O |y|^{2 z2 - 1} psi^{-1}(2 d / y) dy` by shells `y = p^j u`.
///
/// On shell `j` the unit `u` runs over residues modulo `p^{D_j}` with
/// `D_j = max(depth, ceil(j/2))`, so the phase is linear in the coset
/// variable. When `D_j >= j` the phase is constant on the coset; otherwise its
/// linear coefficient is non-integral and the coset integral vanishes.
pub fn padic_integral_comp1(s: &PadicSampler, z2: f64, jmax: u32) -> Result<PadicEstimate, StructError> {
    if z2 <= 0.0 {
        return Err(StructError::Divergent(format!("z2 = {} must be positive", z2)));
    }
    let p = s.p as f64;
    let c = 2 * s.d as i128;
    let (mut re, mut im) = (0.0, 0.0);
    for j in 0..=jmax {
        let dj = s.depth.max(j.div_ceil(2));
        if dj < j {
            continue;
        }
        let m = (s.p as i128).pow(dj);
        let pj = (s.p as i128).pow(j);
        let weight = p.powi(-(dj as i32)) * p.powi(-(j as i32)) * p.powf(-(j as f64) * (2.0 * z2 - 1.0));
        for u0 in 1..m {
            if u0 % s.p as i128 == 0 {
                continue;
            }
            let num = if j == 0 { 0 } else { c * inv_mod(u0, pj) };
            let (cr, ci) = s.psi(num, j);
            // psi^{-1} is the complex conjugate.
            re += weight * cr;
            im -= weight * ci;
        }
    }
    // Shell j has absolute mass at most (1 - 1/p) p^{-2 z2 j}.
    let r = p.powf(-2.0 * z2);
    let tail_bound = (1.0 - 1.0 / p) * r.powi(jmax as i32 + 1) / (1.0 - r);
    Ok(PadicEstimate { re, im, tail_bound, target: comp1_closed(p, z2) })
}

/// Closed form `-q^{-2} [1 + (q - 1)(1 - qX)/(1 + X)]` with `X = -q^s`.
pub fn comp2_closed(q: f64, s: f64) -> f64 {
    let x = -q.powf(s);
    -(1.0 / (q * q)) * (1.0 + (q - 1.0) * (1.0 - q * x) / (1.0 + x))
}

/// Closed form of the unit-square stratum `(q^2 - q - 1)/q^2 + (1 - 1/q)/(q^s - 1)`.
pub fn comp2_unit_closed(q: f64, s: f64) -> f64 {
    (q * q - q - 1.0) / (q * q) + (1.0 - 1.0 / q) / (q.powf(s) - 1.0)
}

/// Estimates for the full square and the unit stratum of the second integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Comp2Estimate {
    pub total: PadicEstimate,
    pub unit_stratum: PadicEstimate,
}

fn valuation(mut x: i128, p: i128, cap: u32) -> u32 {
    if x == 0 {
        return cap;
    }
    let mut v = 0;
    while x % p == 0 && v < cap {
        x /= p;
        v += 1;
    }
    v
}

/// `int int_{O^2} |a^2 - d b^2 + b|^{2 z1 + z0 - 1} da db` by cosets modulo `p^depth`.
///
/// Where `f = a^2 - d b^2 + b` has valuation below the depth it is constant in
/// absolute value on the coset. Elsewhere the gradient `(2a, 1 - 2db)` is a
/// unit (it cannot vanish on `f = 0` modulo `p`), so `f` restricted to the
/// coset is `p^depth` times a uniformly distributed integer and the coset
/// integral is `p^{-2 depth} p^{-depth (s - 1)} (1 - 1/p) / (1 - p^{-s})`.
pub fn padic_integral_comp2(sm: &PadicSampler, z1: f64, z0: f64) -> Result<Comp2Estimate, StructError> {
    let s = 2.0 * z1 + z0;
    if s <= 1.0 {
        return Err(StructError::Divergent(format!("2 z1 + z0 = {} must exceed 1", s)));
    }
    let p = sm.p as f64;
    let pi = sm.p as i128;
    let dep = sm.depth;
    let m = pi.pow(dep);
    let cell = p.powi(-2 * dep as i32);
    let hensel = cell * p.powf(-(dep as f64) * (s - 1.0)) * (1.0 - 1.0 / p) / (1.0 - p.powf(-s));
    let (mut total, mut unit) = (0.0, 0.0);
    for a in 0..m {
        for b in 0..m {
            let f = (a * a - sm.d as i128 * b * b + b).rem_euclid(m);
            let v = valuation(f, pi, dep);
            let c = if v < dep { cell * p.powf(-(v as f64) * (s - 1.0)) } else { hensel };
            total += c;
            if a % pi != 0 || b % pi != 0 {
                unit += c;
            }
        }
    }
    Ok(Comp2Estimate {
        total: PadicEstimate { re: total, im: 0.0, tail_bound: 0.0, target: comp2_closed(p, s) },
        unit_stratum: PadicEstimate { re: unit, im: 0.0, tail_bound: 0.0, target: comp2_unit_closed(p, s) },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactalg::rat;
    use crate::satake::{sym_q, sym_u, sym_v};
    use crate::theta::orbit_table;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn d5() -> RationalFn {
        konst(int(5))
    }

    #[test]
    fn quad_ext_arithmetic() {
        let d = d5();
        let x = QuadExtScalar::rational(int(2), int(3), &d);
        let y = QuadExtScalar::rational(int(-1), rat(1, 2), &d);
        let p = &x * &y;
        assert_eq!(p.a, konst(int(-2) + int(3) * rat(1, 2) * int(5)));
        assert_eq!(p.b, konst(int(1) - int(3)));
        assert_eq!(x.norm(), konst(int(4 - 45)));
        assert_eq!(&x * &x.inverse().unwrap(), QuadExtScalar::one(&d));
        assert_eq!((&x * &y).norm(), &x.norm() * &y.norm());
    }

    #[test]
    fn lemfact1_numeric_and_excluded() {
        let d = d5();
        assert!(lemfact1_check(1, &QuadExtScalar::one(&d)).unwrap());
        assert!(matches!(lemfact1_check(1, &QuadExtScalar::zero(&d)), Err(StructError::Excluded(_))));
        assert!(lemfact1_check(2, &QuadExtScalar::rational(int(3), int(2), &d)).unwrap());
        assert!(matches!(lemfact1_check(3, &QuadExtScalar::one(&d)), Err(StructError::BadFactorizationIndex(3))));
    }

    #[test]
    fn lemfact1_symbolic() {
        // a, b, d are the three free symbols.
        let d = sym_q();
        let y1 = QuadExtScalar::from_f(sym_u(), &d);
        assert!(lemfact1_check(1, &y1).unwrap());
        let y2 = QuadExtScalar::new(sym_u(), sym_v(), d.clone());
        assert!(lemfact1_check(2, &y2).unwrap());
    }

    #[test]
    fn excep_iso_identity_and_delta() {
        let d = d5();
        let one = QuadExtScalar::one(&d);
        let m = excep_iso_matrix(&one, &one, &RationalFn::one(ARITY)).unwrap();
        for (i, row) in m.iter().enumerate() {
            for (j, x) in row.iter().enumerate() {
                assert_eq!(*x, if i == j { RationalFn::one(ARITY) } else { RationalFn::zero(ARITY) });
            }
        }
        let del = QuadExtScalar::delta(&d);
        assert!(excep_iso_check(&del, &one, &RationalFn::one(ARITY)).unwrap());
        let got = excep_iso_matrix(&del, &one, &RationalFn::one(ARITY)).unwrap();
        assert_eq!(got[0][0], konst(int(-5)));
    }

    #[test]
    fn excep_iso_random_and_homomorphism() {
        let d = d5();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let r = |rng: &mut ChaCha8Rng| rat(rng.gen_range(1..15), rng.gen_range(1..7));
        for _ in 0..10 {
            let a = QuadExtScalar::rational(r(&mut rng), r(&mut rng), &d);
            let b = QuadExtScalar::rational(r(&mut rng), -r(&mut rng), &d);
            let x = QuadExtScalar::rational(r(&mut rng), r(&mut rng), &d);
            let nu = x.norm();
            assert!(excep_iso_check(&a, &b, &nu).unwrap());
            let a2 = QuadExtScalar::rational(r(&mut rng), r(&mut rng), &d);
            let b2 = QuadExtScalar::rational(r(&mut rng), r(&mut rng), &d);
            let nu2 = konst(r(&mut rng));
            let m1 = excep_iso_matrix(&a, &b, &nu).unwrap();
            let m2 = excep_iso_matrix(&a2, &b2, &nu2).unwrap();
            let m12 = excep_iso_matrix(&(&a * &a2), &(&b * &b2), &(&nu * &nu2)).unwrap();
            let prod: Vec<Vec<RationalFn>> = (0..6)
                .map(|i| {
                    (0..6)
                        .map(|j| (0..6).fold(RationalFn::zero(ARITY), |acc, k| &acc + &(&m1[i][k] * &m2[k][j])))
                        .collect()
                })
                .collect();
            assert_eq!(prod, m12);
        }
    }

    #[test]
    fn stabilizers_fix_their_orbits() {
        let d = d5();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for orbit in orbit_table() {
            for _ in 0..5 {
                let s = stabilizer_sample(&orbit, &d, &mut rng);
                assert!(stabilizer_check(&orbit, &s).unwrap(), "orbit {}", orbit.name());
            }
        }
    }

    #[test]
    fn open_orbit_rejects_unipotent() {
        let d = d5();
        let open = orbit_table().into_iter().find(|o| o.open).unwrap();
        let alpha = QuadExtScalar::rational(int(1), int(2), &d);
        let u = shalika_unipotent(&alpha, &konst(int(3)), &QuadExtScalar::zero(&d));
        assert!(unitary_similitude(&u).is_some());
        assert!(!stabilizer_check(&open, &u).unwrap());
    }

    #[test]
    fn comp1_matches_closed_form() {
        for (p, z2) in [(3u64, 1.0), (5, 1.5)] {
            let s = PadicSampler::new(p, 3).unwrap();
            let est = padic_integral_comp1(&s, z2, 12).unwrap();
            assert!(est.error() < 1e-9 && est.tail_bound < 1e-9, "p={} err={}", p, est.error());
        }
        let s = PadicSampler::new(7, 3).unwrap();
        let shell0 = padic_integral_comp1(&s, 1.0, 0).unwrap();
        assert!((shell0.re - (1.0 - 1.0 / 7.0)).abs() < 1e-12);
    }

    #[test]
    fn comp2_matches_closed_form() {
        let s3 = PadicSampler::new(3, 3).unwrap();
        let e = padic_integral_comp2(&s3, 1.0, 0.5).unwrap();
        assert!(e.total.error() < 1e-6);
        assert!(e.unit_stratum.error() < 1e-6);
        assert!((e.total.re - 0.6165).abs() < 1e-4);
        let s5 = PadicSampler::new(5, 3).unwrap();
        assert!(padic_integral_comp2(&s5, 2.0, -1.0).unwrap().total.error() < 1e-6);
        assert!(padic_integral_comp2(&s5, 0.25, 0.25).is_err());
    }

    #[test]
    fn sampler_basics() {
        assert!(PadicSampler::new(9, 2).is_err());
        assert!(PadicSampler::new(2, 2).is_err());
        let s = PadicSampler::new(5, 2).unwrap();
        assert_eq!(s.d, 2);
        let (re, _) = s.psi(7, 0);
        assert!((re - 1.0).abs() < 1e-15);
        let (re, im) = s.psi(1, 1);
        assert!((re - (2.0 * PI / 5.0).cos()).abs() < 1e-15 && im > 0.0);
    }
}
