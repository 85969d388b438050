//! The group ring D[Q8 × Cp]: quaternion group of order 8 times a cyclic
//! group of odd prime order.
//!
//! Elements are written Σ_g f_g(t)·g with g running over the fixed order
//! {1, a, b, c, z, az, bz, cz} and each f_g ∈ D[Cp]. The Q8 table is
//! generated from the quaternion model (a ↦ i, b ↦ j, c ↦ k, z ↦ −1), so
//! a² = b² = c² = z, ab = c, ba = cz.
//!
//! Three structural maps matter downstream:
//!
//! * θ collapses the Cp factor (t ↦ 1);
//! * the abelianisation characters give four Z[Cp]-valued projections
//!   w₁, w_a, w_b, w_c built from F_g = f_g + f_{gz};
//! * ρ is the faithful 2-dimensional representation over Q(ε): a and b map
//!   to the matrices [[0,1],[−1,0]] and [[r,s],[s,−r]] with r² + s² = −1
//!   from the solver, z to −I, and t to εI.
//!
//! The nilpotent elements of Q[G] are exactly the Σ α_g·g(1−z) over
//! g ∈ {a,b,c} with α_a² + α_b² + α_c² = 0, all of square zero; the module
//! classifies them and constructs a canonical nonzero one whenever the
//! order of 2 mod p is even.

use std::sync::OnceLock;

use num_traits::Zero;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclic::{CyclicRingElt, Domain};
use crate::cyclotomic::CyclotomicElt;
use crate::error::{Error, Result};
use crate::linalg;
use crate::ratio::{is_integer, json_from_rat, rat_from_json, rat_int, Rat};
use crate::rs_solve::solve_r_s;

/// One of the eight quaternion group elements, by index into the fixed
/// order {1, a, b, c, z, az, bz, cz}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Q8Elt(pub(crate) usize);

pub const Q8_ORDER: usize = 8;
pub const Q8_NAMES: [&str; 8] = ["1", "a", "b", "c", "z", "az", "bz", "cz"];

impl Q8Elt {
    pub const ONE: Q8Elt = Q8Elt(0);
    pub const A: Q8Elt = Q8Elt(1);
    pub const B: Q8Elt = Q8Elt(2);
    pub const C: Q8Elt = Q8Elt(3);
    pub const Z: Q8Elt = Q8Elt(4);
    pub const AZ: Q8Elt = Q8Elt(5);
    pub const BZ: Q8Elt = Q8Elt(6);
    pub const CZ: Q8Elt = Q8Elt(7);

    pub fn all() -> [Q8Elt; 8] {
        [0, 1, 2, 3, 4, 5, 6, 7].map(Q8Elt)
    }

    pub fn index(self) -> usize {
        self.0
    }

    pub fn name(self) -> &'static str {
        Q8_NAMES[self.0]
    }

    pub fn mul(self, other: Q8Elt) -> Q8Elt {
        Q8Elt(q8_table()[self.0][other.0])
    }

    pub fn inverse(self) -> Q8Elt {
        let row = &q8_table()[self.0];
        Q8Elt(row.iter().position(|&k| k == 0).unwrap())
    }

    pub fn is_central(self) -> bool {
        self.0 == 0 || self.0 == 4
    }
}

/// Multiplication table, generated once from the quaternion model:
/// element k·4·s is the basis quaternion k ∈ {1,i,j,k} with sign s.
fn q8_table() -> &'static [[usize; 8]; 8] {
    static TABLE: OnceLock<[[usize; 8]; 8]> = OnceLock::new();
    TABLE.get_or_init(|| {
        // (basis, sign): basis 0..4 = 1, i, j, k; sign 0 = +, 1 = −.
        // Index encoding matches Q8_NAMES: index = basis + 4·sign.
        let quat_mul = |x: usize, y: usize| -> (usize, usize) {
            // returns (basis, extra sign) of basis_x · basis_y
            const BASIS: [[(usize, usize); 4]; 4] = [
                [(0, 0), (1, 0), (2, 0), (3, 0)],
                [(1, 0), (0, 1), (3, 0), (2, 1)],
                [(2, 0), (3, 1), (0, 1), (1, 0)],
                [(3, 0), (2, 0), (1, 1), (0, 1)],
            ];
            BASIS[x][y]
        };
        let mut table = [[0usize; 8]; 8];
        for g in 0..8 {
            for h in 0..8 {
                let (basis, flip) = quat_mul(g % 4, h % 4);
                let sign = (g / 4 + h / 4 + flip) % 2;
                table[g][h] = basis + 4 * sign;
            }
        }
        // The table is frozen; sanity of the presentation is asserted once.
        let m = |x: usize, y: usize| table[x][y];
        assert_eq!(m(1, 1), 4, "a² = z");
        assert_eq!(m(2, 2), 4, "b² = z");
        assert_eq!(m(3, 3), 4, "c² = z");
        assert_eq!(m(4, 4), 0, "z² = 1");
        assert_eq!(m(1, 2), 3, "ab = c");
        assert_eq!(m(2, 1), 7, "ba = cz");
        table
    })
}

/// An element Σ_g f_g(t)·g of D[Q8 × Cp].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GRingElt {
    p: u64,
    domain: Domain,
    components: Vec<CyclicRingElt>,
}

impl GRingElt {
    pub fn from_components(components: Vec<CyclicRingElt>) -> Result<Self> {
        if components.len() != Q8_ORDER {
            return Err(Error::Precondition(format!(
                "need exactly {Q8_ORDER} components, got {}",
                components.len()
            )));
        }
        let p = components[0].p();
        let domain = components[0].domain();
        if components.iter().any(|f| f.p() != p || f.domain() != domain) {
            return Err(Error::DomainMismatch(
                "components disagree on p or coefficient domain".into(),
            ));
        }
        Ok(GRingElt { p, domain, components })
    }

    pub fn zero(p: u64, domain: Domain) -> Result<Self> {
        let z = CyclicRingElt::zero(p, domain)?;
        Ok(GRingElt { p, domain, components: vec![z; Q8_ORDER] })
    }

    pub fn one(p: u64, domain: Domain) -> Result<Self> {
        Self::group_elt(p, domain, Q8Elt::ONE, 0)
    }

    /// The group element t^k·g as a ring element.
    pub fn group_elt(p: u64, domain: Domain, g: Q8Elt, k: u64) -> Result<Self> {
        let mut x = Self::zero(p, domain)?;
        x.components[g.index()] = CyclicRingElt::t_pow(p, domain, k)?;
        Ok(x)
    }

    /// f(t)·g as a ring element.
    pub fn from_cyclic(f: &CyclicRingElt, g: Q8Elt) -> Result<Self> {
        let mut x = Self::zero(f.p(), f.domain())?;
        x.components[g.index()] = f.clone();
        Ok(x)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn component(&self, g: Q8Elt) -> &CyclicRingElt {
        &self.components[g.index()]
    }

    pub fn components(&self) -> &[CyclicRingElt] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(CyclicRingElt::is_zero)
    }

    pub fn coerce(&self, target: Domain) -> Result<Self> {
        let components =
            self.components.iter().map(|f| f.coerce(target)).collect::<Result<Vec<_>>>()?;
        Ok(GRingElt { p: self.p, domain: target, components })
    }

    fn align(&self, other: &Self) -> Result<(Self, Self)> {
        if self.p != other.p {
            return Err(Error::DomainMismatch(format!(
                "group ring elements over p = {} and p = {}",
                self.p, other.p
            )));
        }
        if self.domain == other.domain {
            return Ok((self.clone(), other.clone()));
        }
        match (self.domain, other.domain) {
            (Domain::Z, d) => Ok((self.coerce(d)?, other.clone())),
            (d, Domain::Z) => Ok((self.clone(), other.coerce(d)?)),
            (a, b) => Err(Error::DomainMismatch(format!(
                "incompatible domains {a:?} and {b:?}"
            ))),
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let (x, y) = self.align(other)?;
        let components = x
            .components
            .iter()
            .zip(&y.components)
            .map(|(f, h)| f.add(h))
            .collect::<Result<Vec<_>>>()?;
        Ok(GRingElt { p: x.p, domain: x.domain, components })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        let (x, y) = self.align(other)?;
        let components = x
            .components
            .iter()
            .zip(&y.components)
            .map(|(f, h)| f.sub(h))
            .collect::<Result<Vec<_>>>()?;
        Ok(GRingElt { p: x.p, domain: x.domain, components })
    }

    pub fn neg(&self) -> Self {
        let components = self.components.iter().map(CyclicRingElt::neg).collect();
        GRingElt { p: self.p, domain: self.domain, components }
    }

    pub fn scale(&self, k: &Rat) -> Result<Self> {
        let components =
            self.components.iter().map(|f| f.scale(k)).collect::<Result<Vec<_>>>()?;
        Ok(GRingElt { p: self.p, domain: self.domain, components })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let (x, y) = self.align(other)?;
        let mut out = Self::zero(x.p, x.domain)?;
        for (gi, f) in x.components.iter().enumerate() {
            if f.is_zero() {
                continue;
            }
            for (hj, h) in y.components.iter().enumerate() {
                if h.is_zero() {
                    continue;
                }
                let k = q8_table()[gi][hj];
                out.components[k] = out.components[k].add(&f.mul(h)?)?;
            }
        }
        Ok(out)
    }

    pub fn pow(&self, e: u64) -> Result<Self> {
        let mut acc = Self::one(self.p, self.domain)?;
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base)?;
            }
            base = base.mul(&base)?;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Sum of all coefficients — the ring map sending every group element
    /// to 1.
    pub fn augmentation(&self) -> Rat {
        let mut acc = rat_int(0);
        for f in &self.components {
            acc += f.augmentation();
        }
        // Re-canonicalise for the modular domains.
        match self.domain.modulus() {
            None => acc,
            Some(_) => CyclicRingElt::from_coeffs(self.p, self.domain, vec![acc])
                .unwrap()
                .augmentation(),
        }
    }

    /// The involution induced by g ↦ g⁻¹ on the whole group Q8 × Cp: an
    /// anti-automorphism (star(xy) = star(y)·star(x)).
    pub fn star(&self) -> Self {
        let mut components = vec![CyclicRingElt::zero(self.p, self.domain).unwrap(); Q8_ORDER];
        for (gi, f) in self.components.iter().enumerate() {
            components[Q8Elt(gi).inverse().index()] = f.star();
        }
        GRingElt { p: self.p, domain: self.domain, components }
    }

    /// θ: collapse the Cp factor (t ↦ 1). Each f_g becomes the constant
    /// equal to its augmentation; the kernel is (1−t)·D[G].
    pub fn theta(&self) -> Self {
        let components = self
            .components
            .iter()
            .map(|f| {
                CyclicRingElt::from_coeffs(self.p, self.domain, vec![f.augmentation()]).unwrap()
            })
            .collect();
        GRingElt { p: self.p, domain: self.domain, components }
    }

    /// The four abelianised projections. With F_g = f_g + f_{gz} for
    /// g ∈ {1, a, b, c}:
    ///
    /// w₁ = F₁+F_a+F_b+F_c, w_a = F₁+F_a−F_b−F_c,
    /// w_b = F₁−F_a+F_b−F_c, w_c = F₁−F_a−F_b+F_c —
    ///
    /// the images of x under the four characters of G/⟨z⟩ ≅ C2×C2 (tensored
    /// with the identity on Cp).
    pub fn project_abelian(&self) -> Result<[CyclicRingElt; 4]> {
        let f = |g: usize| -> Result<CyclicRingElt> {
            self.components[g].add(&self.components[g + 4])
        };
        let (f1, fa, fb, fc) = (f(0)?, f(1)?, f(2)?, f(3)?);
        let w1 = f1.add(&fa)?.add(&fb)?.add(&fc)?;
        let wa = f1.add(&fa)?.sub(&fb)?.sub(&fc)?;
        let wb = f1.sub(&fa)?.add(&fb)?.sub(&fc)?;
        let wc = f1.sub(&fa)?.sub(&fb)?.add(&fc)?;
        Ok([w1, wa, wb, wc])
    }

    /// ξ_g = f_g(ε) − f_{gz}(ε) for g ∈ {1, a, b, c}: the coordinates of
    /// the image of x in the block where z acts as −1.
    pub fn xi(&self) -> Result<[CyclotomicElt; 4]> {
        let xi = |g: usize| -> Result<CyclotomicElt> {
            self.components[g].sub(&self.components[g + 4])?.eval_eps()
        };
        Ok([xi(0)?, xi(1)?, xi(2)?, xi(3)?])
    }

    /// ρ: the faithful 2-dimensional representation over Q(ε). Computed by
    /// the closed form
    ///
    /// ρ(x) = [[ξ₁ + r·ξ_b + s·ξ_c, ξ_a + s·ξ_b − r·ξ_c],
    ///         [−ξ_a + s·ξ_b − r·ξ_c, ξ₁ − r·ξ_b − s·ξ_c]]
    ///
    /// with (r, s) the solver's pair. Fails with NoSolution when the order
    /// of 2 mod p is odd (no such representation matrix over Q(ε) exists).
    pub fn rho(&self) -> Result<Mat2Cyc> {
        let (r, s) = solve_r_s(self.p)?;
        let [x1, xa, xb, xc] = self.xi()?;
        let rxb = r.mul(&xb)?;
        let sxc = s.mul(&xc)?;
        let sxb = s.mul(&xb)?;
        let rxc = r.mul(&xc)?;
        let e00 = x1.add(&rxb)?.add(&sxc)?;
        let e01 = xa.add(&sxb)?.sub(&rxc)?;
        let e10 = xa.neg().add(&sxb)?.sub(&rxc)?;
        let e11 = x1.sub(&rxb)?.sub(&sxc)?;
        Ok(Mat2Cyc { entries: [e00, e01, e10, e11] })
    }

    /// ρ again, but through the generator images: each group element is a
    /// word in the matrices ρ(a), ρ(b), and each f_g(t) evaluates to the
    /// scalar f_g(ε). An independent code path used to cross-check the
    /// closed form.
    pub fn rho_via_generators(&self) -> Result<Mat2Cyc> {
        let p = self.p;
        let (r, s) = solve_r_s(p)?;
        let zero = CyclotomicElt::zero(p)?;
        let one = CyclotomicElt::one(p)?;
        let mat_a = Mat2Cyc {
            entries: [zero.clone(), one.clone(), one.neg(), zero.clone()],
        };
        let mat_b = Mat2Cyc { entries: [r.clone(), s.clone(), s.clone(), r.neg()] };
        // Words in a, b spelling out {1, a, b, c, z, az, bz, cz}.
        let words: [&[usize]; 8] = [
            &[],
            &[0],
            &[1],
            &[0, 1],
            &[0, 0],
            &[0, 0, 0],
            &[1, 0, 0],
            &[0, 1, 0, 0],
        ];
        let gens = [mat_a, mat_b];
        let mut acc = Mat2Cyc::zero(p)?;
        for (gi, word) in words.iter().enumerate() {
            let f = &self.components[gi];
            if f.is_zero() {
                continue;
            }
            let mut m = Mat2Cyc::identity(p)?;
            for &w in word.iter() {
                m = m.mul(&gens[w])?;
            }
            acc = acc.add(&m.scale(&f.eval_eps()?)?)?;
        }
        Ok(acc)
    }

    /// Nilpotency classification: x is nilpotent iff it has the shape
    /// Σ_{g∈{a,b,c}} α_g·g(1−z) with α_a² + α_b² + α_c² = 0, in which case
    /// x² = 0. Returns the triple (α_a, α_b, α_c) as the witness. Exact
    /// domains only.
    pub fn is_nilpotent(&self) -> Result<Option<[CyclicRingElt; 3]>> {
        if !matches!(self.domain, Domain::Z | Domain::Q) {
            return Err(Error::Precondition(
                "nilpotency classification needs an exact domain (Z or Q)".into(),
            ));
        }
        if !self.components[0].is_zero() || !self.components[4].is_zero() {
            return Ok(None);
        }
        for g in 1..4 {
            if self.components[g + 4] != self.components[g].neg() {
                return Ok(None);
            }
        }
        let alpha = [
            self.components[1].clone(),
            self.components[2].clone(),
            self.components[3].clone(),
        ];
        let mut sum = CyclicRingElt::zero(self.p, self.domain)?;
        for a in &alpha {
            sum = sum.add(&a.mul(a)?)?;
        }
        if !sum.is_zero() {
            return Ok(None);
        }
        debug_assert!(self.mul(self).unwrap().is_zero(), "classified nilpotent must square to 0");
        Ok(Some(alpha))
    }

    /// Exact inverse for integer-coefficient elements: solve the 8p×8p
    /// multiplication system over Q, then insist on integrality.
    pub fn invert(&self) -> Result<Self> {
        if self.domain != Domain::Z {
            return Err(Error::Precondition(format!(
                "integral inversion needs domain Z, got {:?}",
                self.domain
            )));
        }
        let y = self.solve_inverse()?;
        if !y.components.iter().all(|f| f.coeffs().iter().all(is_integer)) {
            return Err(Error::NotAUnit);
        }
        let components = y
            .components
            .iter()
            .map(|f| CyclicRingElt::from_coeffs(self.p, Domain::Z, f.coeffs().to_vec()))
            .collect::<Result<Vec<_>>>()?;
        Ok(GRingElt { p: self.p, domain: Domain::Z, components })
    }

    /// Rational inverse (no integrality requirement). Input may be over Z
    /// or Q; the result is over Q.
    pub fn invert_rational(&self) -> Result<Self> {
        if !matches!(self.domain, Domain::Z | Domain::Q) {
            return Err(Error::Precondition(
                "rational inversion needs an exact domain (Z or Q)".into(),
            ));
        }
        self.coerce(Domain::Q)?.solve_inverse()
    }

    /// Core of both inversion paths: u·x = 1 as a linear system over Q in
    /// the 8p coordinates of x. Basis index: g·p + j for t^j·g.
    fn solve_inverse(&self) -> Result<Self> {
        let p = self.p as usize;
        let n = 8 * p;
        let mut a = vec![vec![rat_int(0); n]; n];
        for (h, f) in self.components.iter().enumerate() {
            for (i, coeff) in f.coeffs().iter().enumerate() {
                if coeff.is_zero() {
                    continue;
                }
                for g in 0..8 {
                    let k = q8_table()[h][g];
                    for j in 0..p {
                        // u·(t^j g) contributes coeff to t^{i+j}·(hg).
                        a[k * p + (i + j) % p][g * p + j] += coeff;
                    }
                }
            }
        }
        let mut rhs = vec![rat_int(0); n];
        rhs[0] = rat_int(1);
        let y = linalg::solve(a, rhs).ok_or(Error::NotAUnit)?;
        let components = y
            .chunks(p)
            .map(|chunk| CyclicRingElt::from_coeffs(self.p, Domain::Q, chunk.to_vec()))
            .collect::<Result<Vec<_>>>()?;
        let inv = GRingElt { p: self.p, domain: Domain::Q, components };
        debug_assert!(self
            .coerce(Domain::Q)
            .unwrap()
            .mul(&inv)
            .unwrap()
            .sub(&Self::one(self.p, Domain::Q).unwrap())
            .unwrap()
            .is_zero());
        Ok(inv)
    }
}

/// A canonical nonzero nilpotent: Σ α_g·g(1−z) with α_a = 1−t,
/// α_b = (1−t)·R, α_c = (1−t)·S, where R, S reuse the power-basis
/// coefficients of the solver's r, s as polynomial coefficients in t.
/// The common factor (1−t) makes the coefficient identity
/// α_a² + α_b² + α_c² = 0 hold exactly in Z[Cp], not just at t = ε:
/// 1 + R² + S² evaluates to 0 at ε, hence is an integer multiple of
/// σ = 1 + t + ⋯ + t^{p−1}, and (1−t)σ = 0.
pub fn make_nilpotent(p: u64) -> Result<GRingElt> {
    let (r, s) = solve_r_s(p)?;
    let lift = |x: &CyclotomicElt| -> Result<CyclicRingElt> {
        CyclicRingElt::from_coeffs(p, Domain::Z, x.coeffs().to_vec())
    };
    let one_minus_t = CyclicRingElt::from_int_coeffs(p, Domain::Z, &[1, -1])?;
    let alpha_a = one_minus_t.clone();
    let alpha_b = one_minus_t.mul(&lift(&r)?)?;
    let alpha_c = one_minus_t.mul(&lift(&s)?)?;
    let mut out = GRingElt::zero(p, Domain::Z)?;
    for (g, alpha) in [(1usize, alpha_a), (2, alpha_b), (3, alpha_c)] {
        out.components[g] = alpha.clone();
        out.components[g + 4] = alpha.neg();
    }
    debug_assert!(out.is_nilpotent()?.is_some());
    Ok(out)
}

/// A 2×2 matrix over Q(ε_p), row-major.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Mat2Cyc {
    entries: [CyclotomicElt; 4],
}

impl Mat2Cyc {
    pub fn zero(p: u64) -> Result<Self> {
        let z = CyclotomicElt::zero(p)?;
        Ok(Mat2Cyc { entries: [z.clone(), z.clone(), z.clone(), z] })
    }

    pub fn identity(p: u64) -> Result<Self> {
        let z = CyclotomicElt::zero(p)?;
        let o = CyclotomicElt::one(p)?;
        Ok(Mat2Cyc { entries: [o.clone(), z.clone(), z, o] })
    }

    pub fn entries(&self) -> &[CyclotomicElt; 4] {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> &CyclotomicElt {
        &self.entries[2 * row + col]
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut entries = self.entries.clone();
        for (e, o) in entries.iter_mut().zip(&other.entries) {
            *e = e.add(o)?;
        }
        Ok(Mat2Cyc { entries })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        let a = &self.entries;
        let b = &other.entries;
        Ok(Mat2Cyc {
            entries: [
                a[0].mul(&b[0])?.add(&a[1].mul(&b[2])?)?,
                a[0].mul(&b[1])?.add(&a[1].mul(&b[3])?)?,
                a[2].mul(&b[0])?.add(&a[3].mul(&b[2])?)?,
                a[2].mul(&b[1])?.add(&a[3].mul(&b[3])?)?,
            ],
        })
    }

    pub fn scale(&self, k: &CyclotomicElt) -> Result<Self> {
        let mut entries = self.entries.clone();
        for e in entries.iter_mut() {
            *e = e.mul(k)?;
        }
        Ok(Mat2Cyc { entries })
    }

    pub fn neg(&self) -> Self {
        Mat2Cyc { entries: self.entries.clone().map(|e| e.neg()) }
    }

    pub fn trace(&self) -> CyclotomicElt {
        self.entries[0].add(&self.entries[3]).unwrap()
    }

    pub fn det(&self) -> CyclotomicElt {
        self.entries[0]
            .mul(&self.entries[3])
            .unwrap()
            .sub(&self.entries[1].mul(&self.entries[2]).unwrap())
            .unwrap()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(CyclotomicElt::is_zero)
    }

    /// Scalar matrices λI.
    pub fn is_scalar(&self) -> bool {
        self.entries[1].is_zero()
            && self.entries[2].is_zero()
            && self.entries[0] == self.entries[3]
    }

    /// A 2×2 matrix is nilpotent iff trace and determinant both vanish
    /// (its characteristic polynomial is then x²).
    pub fn is_nilpotent(&self) -> bool {
        self.trace().is_zero() && self.det().is_zero()
    }
}

#[derive(Serialize, Deserialize)]
struct GRingJson {
    p: u64,
    domain: Domain,
    components: ComponentsJson,
}

#[derive(Serialize, Deserialize)]
struct ComponentsJson {
    #[serde(rename = "1")]
    one: Vec<serde_json::Value>,
    a: Vec<serde_json::Value>,
    b: Vec<serde_json::Value>,
    c: Vec<serde_json::Value>,
    z: Vec<serde_json::Value>,
    az: Vec<serde_json::Value>,
    bz: Vec<serde_json::Value>,
    cz: Vec<serde_json::Value>,
}

impl Serialize for GRingElt {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let dump =
            |g: usize| -> Vec<serde_json::Value> {
                self.components[g].coeffs().iter().map(json_from_rat).collect()
            };
        GRingJson {
            p: self.p,
            domain: self.domain,
            components: ComponentsJson {
                one: dump(0),
                a: dump(1),
                b: dump(2),
                c: dump(3),
                z: dump(4),
                az: dump(5),
                bz: dump(6),
                cz: dump(7),
            },
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for GRingElt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = GRingJson::deserialize(deserializer)?;
        let c = &raw.components;
        let lists = [&c.one, &c.a, &c.b, &c.c, &c.z, &c.az, &c.bz, &c.cz];
        let components = lists
            .iter()
            .map(|vals| {
                let coeffs = vals
                    .iter()
                    .map(rat_from_json)
                    .collect::<Result<Vec<_>>>()
                    .map_err(|e| D::Error::custom(e.to_string()))?;
                if coeffs.len() != raw.p as usize {
                    return Err(D::Error::custom(format!(
                        "expected {} coefficients per component for p = {}, got {}",
                        raw.p,
                        raw.p,
                        coeffs.len()
                    )));
                }
                CyclicRingElt::from_coeffs(raw.p, raw.domain, coeffs)
                    .map_err(|e| D::Error::custom(e.to_string()))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        GRingElt::from_components(components).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(p: u64, elt: Q8Elt) -> GRingElt {
        GRingElt::group_elt(p, Domain::Z, elt, 0).unwrap()
    }

    #[test]
    fn presentation_and_associativity() {
        let t = q8_table();
        // a⁴ = 1 and a² = b² = c² = z.
        let sq = |x: usize| t[x][x];
        assert_eq!(sq(sq(1)), 0);
        assert_eq!(sq(1), 4);
        assert_eq!(sq(2), 4);
        assert_eq!(sq(3), 4);
        // bab⁻¹ = a⁻¹ and c = ab.
        let b_inv = Q8Elt::B.inverse().index();
        assert_eq!(t[t[2][1]][b_inv], Q8Elt::A.inverse().index());
        assert_eq!(t[1][2], 3);
        // Full associativity, all 512 triples.
        for x in 0..8 {
            for y in 0..8 {
                for w in 0..8 {
                    assert_eq!(t[t[x][y]][w], t[x][t[y][w]]);
                }
            }
        }
        // Inverses and centre.
        for x in Q8Elt::all() {
            assert_eq!(x.mul(x.inverse()), Q8Elt::ONE);
        }
        assert!(Q8Elt::Z.is_central() && Q8Elt::ONE.is_central());
        assert!(!Q8Elt::A.is_central());
    }

    #[test]
    fn group_law_in_the_ring() {
        let (a, b) = (g(5, Q8Elt::A), g(5, Q8Elt::B));
        assert_eq!(a.mul(&b).unwrap(), g(5, Q8Elt::C));
        assert_eq!(b.mul(&a).unwrap(), g(5, Q8Elt::CZ));

        let one = GRingElt::one(5, Domain::Z).unwrap();
        let one_minus_z = one.sub(&g(5, Q8Elt::Z)).unwrap();
        let sq = one_minus_z.mul(&one_minus_z).unwrap();
        assert_eq!(sq, one_minus_z.scale(&rat_int(2)).unwrap(), "(1−z)² = 2(1−z)");
    }

    #[test]
    fn augmentation_and_star() {
        let x = g(5, Q8Elt::A)
            .add(&g(5, Q8Elt::B).scale(&rat_int(2)).unwrap())
            .unwrap();
        assert_eq!(x.augmentation(), rat_int(3));

        // star is an anti-automorphism extending g ↦ g⁻¹, t ↦ t⁻¹.
        let ta = GRingElt::group_elt(5, Domain::Z, Q8Elt::A, 1).unwrap();
        let expected = GRingElt::group_elt(5, Domain::Z, Q8Elt::AZ, 4).unwrap();
        assert_eq!(ta.star(), expected, "(ta)* = t⁻¹a⁻¹ = t⁴·az");

        let y = g(5, Q8Elt::B).add(&GRingElt::group_elt(5, Domain::Z, Q8Elt::C, 2).unwrap()).unwrap();
        assert_eq!(x.mul(&y).unwrap().star(), y.star().mul(&x.star()).unwrap());
        assert_eq!(x.star().star(), x);
    }

    #[test]
    fn theta_collapses_cp() {
        let ta = GRingElt::group_elt(5, Domain::Z, Q8Elt::A, 1).unwrap();
        assert_eq!(ta.theta(), g(5, Q8Elt::A));

        let one_minus_t = CyclicRingElt::from_int_coeffs(5, Domain::Z, &[1, -1]).unwrap();
        let beta = GRingElt::from_cyclic(
            &CyclicRingElt::from_int_coeffs(5, Domain::Z, &[2, 0, -1, 3, 0]).unwrap(),
            Q8Elt::BZ,
        )
        .unwrap();
        let killed = GRingElt::from_cyclic(&one_minus_t, Q8Elt::ONE)
            .unwrap()
            .mul(&beta)
            .unwrap();
        assert!(killed.theta().is_zero(), "(1−t)·β lies in ker θ");

        let nu = make_nilpotent(5).unwrap();
        let one = GRingElt::one(5, Domain::Z).unwrap();
        assert_eq!(one.add(&nu).unwrap().theta(), one);

        // θ is multiplicative on a sample pair.
        let x = g(5, Q8Elt::A).add(&beta).unwrap();
        let y = ta.add(&g(5, Q8Elt::C)).unwrap();
        assert_eq!(
            x.mul(&y).unwrap().theta(),
            x.theta().mul(&y.theta()).unwrap()
        );
    }

    #[test]
    fn abelian_projections() {
        let one = GRingElt::one(5, Domain::Z).unwrap();
        let ones = one.project_abelian().unwrap();
        let const_one = CyclicRingElt::one(5, Domain::Z).unwrap();
        assert_eq!(ones, [const_one.clone(), const_one.clone(), const_one.clone(), const_one.clone()]);

        let a = g(5, Q8Elt::A);
        let pa = a.project_abelian().unwrap();
        assert_eq!(pa[0], const_one);
        assert_eq!(pa[1], const_one);
        assert_eq!(pa[2], const_one.neg());
        assert_eq!(pa[3], const_one.neg());

        let z = g(5, Q8Elt::Z);
        assert_eq!(z.project_abelian().unwrap(), one.project_abelian().unwrap());
    }

    #[test]
    fn rho_representation() {
        let a = g(5, Q8Elt::A);
        let ra = a.rho().unwrap();
        let minus_i = Mat2Cyc::identity(5).unwrap().neg();
        assert_eq!(ra.mul(&ra).unwrap(), minus_i, "ρ(a)² = −I");
        assert_eq!(g(5, Q8Elt::Z).rho().unwrap(), minus_i);

        // Non-central group elements are traceless.
        for q in [Q8Elt::A, Q8Elt::B, Q8Elt::C, Q8Elt::AZ, Q8Elt::BZ, Q8Elt::CZ] {
            assert!(g(5, q).rho().unwrap().trace().is_zero());
        }
        // Central t^k·z has trace −2ε^k.
        for k in 0..5 {
            let m = GRingElt::group_elt(5, Domain::Z, Q8Elt::Z, k).unwrap().rho().unwrap();
            let expect = CyclotomicElt::eps_pow(5, k).unwrap().scale(&rat_int(-2));
            assert_eq!(m.trace(), expect);
        }

        // ρ(b)² = −I too: r² + s² = −1 is exactly what makes this work.
        let rb = g(5, Q8Elt::B).rho().unwrap();
        assert_eq!(rb.mul(&rb).unwrap(), minus_i);

        // Closed form agrees with the generator-image path, and ρ is
        // multiplicative, on a mixed element.
        let x = g(5, Q8Elt::A)
            .add(&GRingElt::group_elt(5, Domain::Z, Q8Elt::BZ, 3).unwrap())
            .unwrap()
            .add(&GRingElt::one(5, Domain::Z).unwrap().scale(&rat_int(2)).unwrap())
            .unwrap();
        let y = GRingElt::group_elt(5, Domain::Z, Q8Elt::C, 1)
            .unwrap()
            .sub(&g(5, Q8Elt::Z))
            .unwrap();
        assert_eq!(x.rho().unwrap(), x.rho_via_generators().unwrap());
        assert_eq!(y.rho().unwrap(), y.rho_via_generators().unwrap());
        assert_eq!(
            x.mul(&y).unwrap().rho().unwrap(),
            x.rho().unwrap().mul(&y.rho().unwrap()).unwrap()
        );

        // No representation when the order of 2 is odd.
        assert!(matches!(g(7, Q8Elt::A).rho(), Err(Error::NoSolution { p: 7 })));
    }

    #[test]
    fn nilpotents() {
        for p in [3u64, 5, 13] {
            let nu = make_nilpotent(p).unwrap();
            assert!(!nu.is_zero());
            assert!(nu.mul(&nu).unwrap().is_zero(), "ν² = 0 at p = {p}");
            let witness = nu.is_nilpotent().unwrap().expect("constructed ν must classify");
            // Witness coefficients all have augmentation 0.
            for alpha in &witness {
                assert_eq!(alpha.augmentation(), rat_int(0));
            }
        }
        assert!(matches!(make_nilpotent(7), Err(Error::NoSolution { p: 7 })));

        // a(1−z) is not nilpotent: Σ α² = 1 ≠ 0.
        let a_one_minus_z = g(5, Q8Elt::A).sub(&g(5, Q8Elt::AZ)).unwrap();
        assert!(a_one_minus_z.is_nilpotent().unwrap().is_none());
        // Zero is nilpotent with zero witness.
        assert!(GRingElt::zero(5, Domain::Z).unwrap().is_nilpotent().unwrap().is_some());
        // Wrong shape (f₁ ≠ 0) is rejected immediately.
        assert!(GRingElt::one(5, Domain::Z).unwrap().is_nilpotent().unwrap().is_none());
    }

    #[test]
    fn inversion() {
        let a = g(5, Q8Elt::A);
        assert_eq!(a.invert().unwrap(), g(5, Q8Elt::AZ), "a⁻¹ = a³ = az");

        let one = GRingElt::one(5, Domain::Z).unwrap();
        let nu = make_nilpotent(5).unwrap();
        let u = one.add(&nu).unwrap();
        assert_eq!(u.invert().unwrap(), one.sub(&nu).unwrap(), "(1+ν)⁻¹ = 1−ν");

        // σ(a+b+c) + ν has augmentation 3p and is not invertible.
        let sigma = CyclicRingElt::sigma(5, Domain::Z).unwrap();
        let mut w = nu.clone();
        for q in [Q8Elt::A, Q8Elt::B, Q8Elt::C] {
            w = w.add(&GRingElt::from_cyclic(&sigma, q).unwrap()).unwrap();
        }
        assert_eq!(w.augmentation(), rat_int(15));
        assert_eq!(w.invert(), Err(Error::NotAUnit));

        // 2 is rationally invertible but not integrally.
        let two = one.scale(&rat_int(2)).unwrap();
        assert_eq!(two.invert(), Err(Error::NotAUnit));
        let half = two.invert_rational().unwrap();
        assert_eq!(
            half.mul(&two).unwrap(),
            GRingElt::one(5, Domain::Q).unwrap()
        );
    }

    #[test]
    fn json_round_trip() {
        let x = g(3, Q8Elt::A)
            .add(&GRingElt::group_elt(3, Domain::Z, Q8Elt::CZ, 2).unwrap())
            .unwrap();
        let text = serde_json::to_string(&x).unwrap();
        assert!(text.contains("\"components\""));
        assert!(text.contains("\"cz\""));
        let back: GRingElt = serde_json::from_str(&text).unwrap();
        assert_eq!(back, x);

        // Component of the wrong length is rejected.
        let bad = r#"{"p":3,"domain":"Z","components":{"1":[1,0],"a":[0,0,0],"b":[0,0,0],"c":[0,0,0],"z":[0,0,0],"az":[0,0,0],"bz":[0,0,0],"cz":[0,0,0]}}"#;
        assert!(serde_json::from_str::<GRingElt>(bad).is_err());
    }
}
