//! Polynomial differential forms and vector fields on affine N-space.
//!
//! A `PForm` of degree q stores one polynomial per strictly increasing
//! q-tuple of variable indices; tuples are encoded as bitmasks, zero
//! components are never stored, and the representation is canonical.
//! Interior products contract in the first argument slot throughout.

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::poly::{HomDegree, Poly};

/// Strictly increasing index tuples, encoded as a bitmask over variables.
pub(crate) type Key = u16;

pub(crate) fn key_from_indices(idx: &[usize]) -> Option<Key> {
    let mut k: Key = 0;
    for &i in idx {
        if i >= 16 {
            return None;
        }
        let bit = 1u16 << i;
        if k & bit != 0 {
            return None; // repeated index
        }
        k |= bit;
    }
    Some(k)
}

pub(crate) fn key_indices(k: Key) -> Vec<usize> {
    (0..16).filter(|i| k & (1 << i) != 0).collect()
}

/// Parity of the shuffle interleaving `a` before `b` (disjoint masks):
/// counts pairs (i, j) with i in a, j in b, i > j.
fn shuffle_sign(a: Key, b: Key) -> i32 {
    let mut inversions = 0u32;
    let mut bits = b;
    while bits != 0 {
        let j = bits.trailing_zeros();
        inversions += (a >> (j + 1)).count_ones();
        bits &= bits - 1;
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Sign picked up when inserting index `j` in front of the sorted tuple `k`
/// and resorting: (-1)^(number of entries of k below j).
fn insert_sign(j: usize, k: Key) -> i32 {
    let below = (k & ((1u16 << j) - 1)).count_ones();
    if below % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Polynomial differential form of fixed degree.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PForm {
    nvars: usize,
    formdeg: usize,
    comps: BTreeMap<Key, Poly>,
}

impl PForm {
    pub fn zero(nvars: usize, formdeg: usize) -> Self {
        assert!(nvars <= 16, "at most 16 variables supported for forms");
        assert!(formdeg <= nvars, "form degree exceeds variable count");
        PForm {
            nvars,
            formdeg,
            comps: BTreeMap::new(),
        }
    }

    /// Build from (index tuple, coefficient) pairs. Tuples need not be
    /// sorted; signs are adjusted and repeated indices kill the component.
    pub fn from_comps(nvars: usize, formdeg: usize, comps: Vec<(Vec<usize>, Poly)>) -> Self {
        let mut out = PForm::zero(nvars, formdeg);
        for (idx, p) in comps {
            assert_eq!(idx.len(), formdeg, "tuple length must equal form degree");
            assert!(idx.iter().all(|&i| i < nvars), "index out of range");
            assert_eq!(p.nvars(), nvars, "coefficient variable count mismatch");
            out.add_indexed(&idx, p);
        }
        out
    }

    /// A single term `p * dx_{i1} ^ ... ^ dx_{iq}` (indices in any order).
    pub fn term(nvars: usize, idx: &[usize], p: Poly) -> Self {
        PForm::from_comps(nvars, idx.len(), vec![(idx.to_vec(), p)])
    }

    /// 0-form wrapping a polynomial.
    pub fn scalar(p: Poly) -> Self {
        let mut out = PForm::zero(p.nvars(), 0);
        out.add_key(0, p);
        out
    }

    fn add_indexed(&mut self, idx: &[usize], p: Poly) {
        // Sort and track permutation parity.
        let mut v: Vec<usize> = idx.to_vec();
        let mut sign = 1i32;
        for i in 1..v.len() {
            let mut j = i;
            while j > 0 && v[j - 1] > v[j] {
                v.swap(j - 1, j);
                sign = -sign;
                j -= 1;
            }
        }
        if v.windows(2).any(|w| w[0] == w[1]) {
            return; // repeated differential: term is zero
        }
        let key = key_from_indices(&v).expect("indices validated");
        let signed = if sign < 0 { -&p } else { p };
        self.add_key(key, signed);
    }

    pub(crate) fn add_key(&mut self, key: Key, p: Poly) {
        if p.is_zero() {
            return;
        }
        match self.comps.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(p);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                let sum = &*o.get() + &p;
                if sum.is_zero() {
                    o.remove();
                } else {
                    *o.get_mut() = sum;
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn formdeg(&self) -> usize {
        self.formdeg
    }

    pub fn is_zero(&self) -> bool {
        self.comps.is_empty()
    }

    pub fn num_comps(&self) -> usize {
        self.comps.len()
    }

    pub(crate) fn comps(&self) -> impl Iterator<Item = (Key, &Poly)> {
        self.comps.iter().map(|(k, p)| (*k, p))
    }

    /// Component at a (sorted, strictly increasing) index tuple.
    pub fn comp(&self, idx: &[usize]) -> Poly {
        assert_eq!(idx.len(), self.formdeg);
        assert!(
            idx.windows(2).all(|w| w[0] < w[1]),
            "tuple must be strictly increasing"
        );
        match key_from_indices(idx) {
            Some(k) => self
                .comps
                .get(&k)
                .cloned()
                .unwrap_or_else(|| Poly::zero(self.nvars)),
            None => Poly::zero(self.nvars),
        }
    }

    /// Borrowing iterator over the nonzero coefficient polynomials.
    pub fn coeffs(&self) -> impl Iterator<Item = &Poly> {
        self.comps.values()
    }

    /// Components as (sorted tuple, coefficient) pairs in tuple-lex order.
    pub fn components(&self) -> Vec<(Vec<usize>, Poly)> {
        let mut out: Vec<(Vec<usize>, Poly)> = self
            .comps
            .iter()
            .map(|(k, p)| (key_indices(*k), p.clone()))
            .collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn scale(&self, c: &BigRational) -> PForm {
        if c.is_zero() {
            return PForm::zero(self.nvars, self.formdeg);
        }
        PForm {
            nvars: self.nvars,
            formdeg: self.formdeg,
            comps: self.comps.iter().map(|(k, p)| (*k, p.scale(c))).collect(),
        }
    }

    pub fn add(&self, other: &PForm) -> PForm {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        assert_eq!(self.formdeg, other.formdeg, "form degree mismatch");
        let mut out = self.clone();
        for (k, p) in &other.comps {
            out.add_key(*k, p.clone());
        }
        out
    }

    pub fn sub(&self, other: &PForm) -> PForm {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> PForm {
        PForm {
            nvars: self.nvars,
            formdeg: self.formdeg,
            comps: self.comps.iter().map(|(k, p)| (*k, -p)).collect(),
        }
    }

    /// Graded-commutative exterior product.
    pub fn wedge(&self, other: &PForm) -> PForm {
        assert_eq!(self.nvars, other.nvars, "variable count mismatch");
        let q = self.formdeg + other.formdeg;
        if q > self.nvars {
            return PForm::zero(self.nvars, self.nvars.min(q).min(16));
        }
        let mut out = PForm::zero(self.nvars, q);
        for (ka, pa) in &self.comps {
            for (kb, pb) in &other.comps {
                if ka & kb != 0 {
                    continue;
                }
                let sign = shuffle_sign(*ka, *kb);
                let prod = pa * pb;
                out.add_key(ka | kb, if sign < 0 { -&prod } else { prod });
            }
        }
        out
    }

    /// Exterior derivative. A top form maps to the zero (q+1 capped) form.
    pub fn exterior_derivative(&self) -> PForm {
        if self.formdeg >= self.nvars {
            return PForm::zero(self.nvars, self.nvars);
        }
        let mut out = PForm::zero(self.nvars, self.formdeg + 1);
        for (k, p) in &self.comps {
            for j in 0..self.nvars {
                let bit = 1u16 << j;
                if k & bit != 0 {
                    continue;
                }
                let dp = p.partial(j);
                if dp.is_zero() {
                    continue;
                }
                let sign = insert_sign(j, *k);
                out.add_key(k | bit, if sign < 0 { -&dp } else { dp });
            }
        }
        out
    }

    /// Do all coefficients share one total degree? Zero components count as
    /// any degree.
    pub fn coefficient_degree(&self) -> Option<HomDegree> {
        let mut seen: Option<u32> = None;
        for p in self.comps.values() {
            match p.homogeneous_degree()? {
                HomDegree::Any => {}
                HomDegree::Degree(d) => match seen {
                    None => seen = Some(d),
                    Some(s) if s == d => {}
                    _ => return None,
                },
            }
        }
        Some(match seen {
            None => HomDegree::Any,
            Some(d) => HomDegree::Degree(d),
        })
    }

    /// Apply `f` to every coefficient, dropping zero results.
    pub fn map_coeffs(&self, mut f: impl FnMut(&Poly) -> Poly) -> PForm {
        let mut out = PForm::zero(self.nvars, self.formdeg);
        for (k, p) in &self.comps {
            out.add_key(*k, f(p));
        }
        out
    }

    /// Evaluate every coefficient at a point; returns (tuple, value) pairs
    /// for the nonzero entries.
    pub fn eval(&self, pt: &[BigRational]) -> Vec<(Vec<usize>, BigRational)> {
        let mut out = Vec::new();
        for (k, p) in &self.comps {
            let v = p.eval(pt);
            if !v.is_zero() {
                out.push((key_indices(*k), v));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        out
    }

    pub fn vanishes_at(&self, pt: &[BigRational]) -> bool {
        self.comps.values().all(|p| p.eval(pt).is_zero())
    }

    /// Per-coefficient degree-`r` slice.
    pub fn homogeneous_slice(&self, r: u32) -> PForm {
        self.map_coeffs(|p| p.homogeneous_slice(r))
    }

    /// Rewrite in coordinates centered at `center`, truncating coefficients
    /// above total degree `max_deg` when given.
    pub fn taylor_shift(&self, center: &[BigRational], max_deg: Option<u32>) -> PForm {
        self.map_coeffs(|p| p.taylor_shift(center, max_deg))
    }

    /// Restrict to the affine chart `x_s = 1`: substitute, drop `dx_s`
    /// components, and renumber the remaining variables in order.
    pub fn chart_restrict(&self, s: usize) -> PForm {
        assert!(s < self.nvars);
        assert!(self.formdeg < self.nvars, "cannot restrict a top form");
        let n = self.nvars - 1;
        let var_map: Vec<usize> = (0..self.nvars)
            .map(|i| {
                if i < s {
                    i
                } else if i == s {
                    usize::MAX
                } else {
                    i - 1
                }
            })
            .collect();
        // substitution x_s -> 1, others -> renumbered variables
        let subs: Vec<Poly> = (0..self.nvars)
            .map(|i| {
                if i == s {
                    Poly::one(n)
                } else {
                    Poly::var(n, var_map[i])
                }
            })
            .collect();
        let mut out = PForm::zero(n, self.formdeg);
        for (k, p) in &self.comps {
            if k & (1 << s) != 0 {
                continue; // dx_s pulls back to zero
            }
            let idx: Vec<usize> = key_indices(*k).into_iter().map(|i| var_map[i]).collect();
            out.add_indexed(&idx, p.compose(&subs));
        }
        out
    }
}

/// Canonical text form: `(poly)*dx0^dx2 + ...` with components in
/// tuple-lexicographic order; a leading-negative coefficient is pulled out
/// as a minus.
impl fmt::Display for PForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return write!(f, "0");
        }
        for (pos, (idx, p)) in self.components().into_iter().enumerate() {
            let neg = p.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
            let body = if neg { -&p } else { p };
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "({body})")?;
            if !idx.is_empty() {
                let dparts: Vec<String> = idx.iter().map(|i| format!("dx{i}")).collect();
                write!(f, "*{}", dparts.join("^"))?;
            }
        }
        Ok(())
    }
}

/// Polynomial vector field: one component per variable.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct PVec {
    nvars: usize,
    comps: Vec<Poly>,
}

impl PVec {
    pub fn new(comps: Vec<Poly>) -> Self {
        assert!(
            !comps.is_empty(),
            "vector field needs at least one component"
        );
        let nvars = comps[0].nvars();
        assert_eq!(
            comps.len(),
            nvars,
            "component count must equal variable count"
        );
        assert!(
            comps.iter().all(|p| p.nvars() == nvars),
            "component variable counts differ"
        );
        PVec { nvars, comps }
    }

    pub fn zero(nvars: usize) -> Self {
        PVec::new((0..nvars).map(|_| Poly::zero(nvars)).collect())
    }

    /// The radial (Euler) field `sum_i x_i d/dx_i`.
    pub fn radial(nvars: usize) -> Self {
        PVec::new((0..nvars).map(|i| Poly::var(nvars, i)).collect())
    }

    /// Constant field `d/dx_i`.
    pub fn basis(nvars: usize, i: usize) -> Self {
        let mut comps = vec![Poly::zero(nvars); nvars];
        comps[i] = Poly::one(nvars);
        PVec::new(comps)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn comp(&self, i: usize) -> &Poly {
        &self.comps[i]
    }

    pub fn comps(&self) -> &[Poly] {
        &self.comps
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(|p| p.is_zero())
    }

    pub fn add(&self, other: &PVec) -> PVec {
        assert_eq!(self.nvars, other.nvars);
        PVec::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn sub(&self, other: &PVec) -> PVec {
        assert_eq!(self.nvars, other.nvars);
        PVec::new(
            self.comps
                .iter()
                .zip(&other.comps)
                .map(|(a, b)| a - b)
                .collect(),
        )
    }

    pub fn scale(&self, c: &BigRational) -> PVec {
        PVec::new(self.comps.iter().map(|p| p.scale(c)).collect())
    }

    pub fn scale_poly(&self, h: &Poly) -> PVec {
        PVec::new(self.comps.iter().map(|p| p * h).collect())
    }

    pub fn eval(&self, pt: &[BigRational]) -> Vec<BigRational> {
        self.comps.iter().map(|p| p.eval(pt)).collect()
    }

    pub fn vanishes_at(&self, pt: &[BigRational]) -> bool {
        self.comps.iter().all(|p| p.eval(pt).is_zero())
    }

    /// Do all components share homogeneity degree `d`? Zero components pass.
    pub fn homogeneous_of_degree(&self, d: u32) -> bool {
        self.comps.iter().all(|p| match p.homogeneous_degree() {
            Some(HomDegree::Any) => true,
            Some(HomDegree::Degree(k)) => k == d,
            None => false,
        })
    }

    /// Directional derivative of a polynomial along the field.
    pub fn apply(&self, p: &Poly) -> Poly {
        let mut acc = Poly::zero(self.nvars);
        for (j, vj) in self.comps.iter().enumerate() {
            acc = &acc + &(vj * &p.partial(j));
        }
        acc
    }

    /// Jacobian matrix entries `d comps[i] / d x_j` evaluated at a point.
    pub fn jacobian_at(&self, pt: &[BigRational]) -> Vec<Vec<BigRational>> {
        (0..self.nvars)
            .map(|i| {
                (0..self.nvars)
                    .map(|j| self.comps[i].partial(j).eval(pt))
                    .collect()
            })
            .collect()
    }
}

impl fmt::Display for PVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nonzero: Vec<(usize, &Poly)> = self
            .comps
            .iter()
            .enumerate()
            .filter(|(_, p)| !p.is_zero())
            .collect();
        if nonzero.is_empty() {
            return write!(f, "0");
        }
        for (pos, (i, p)) in nonzero.into_iter().enumerate() {
            let neg = p.leading().map(|(_, c)| c.is_negative()).unwrap_or(false);
            let body = if neg { -p } else { (*p).clone() };
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "({body})*d/dx{i}")?;
        }
        Ok(())
    }
}

/// The volume form `dx_0 ^ ... ^ dx_{N-1}` with coefficient 1.
pub fn volume(nvars: usize) -> PForm {
    PForm::term(nvars, &(0..nvars).collect::<Vec<_>>(), Poly::one(nvars))
}

/// Interior product (contraction in the first slot).
pub fn interior_product(v: &PVec, a: &PForm) -> PForm {
    assert_eq!(v.nvars(), a.nvars, "variable count mismatch");
    assert!(a.formdeg >= 1, "cannot contract a 0-form");
    let mut out = PForm::zero(a.nvars, a.formdeg - 1);
    for (k, p) in &a.comps {
        for j in key_indices(*k) {
            let vj = v.comp(j);
            if vj.is_zero() {
                continue;
            }
            let rest = k & !(1u16 << j);
            let sign = insert_sign(j, rest);
            let prod = vj * p;
            out.add_key(rest, if sign < 0 { -&prod } else { prod });
        }
    }
    out
}

/// Contraction with the constant multivector `e_{j1} ^ ... ^ e_{jk}`:
/// successive first-slot contractions, last index applied first.
pub fn interior_multi(idx: &[usize], a: &PForm) -> PForm {
    let mut acc = a.clone();
    for &j in idx.iter().rev() {
        acc = interior_product(&PVec::basis(a.nvars, j), &acc);
    }
    acc
}

/// Lie derivative via Cartan's magic formula `L_v = i_v d + d i_v`.
pub fn lie_derivative(v: &PVec, a: &PForm) -> PForm {
    assert_eq!(v.nvars(), a.nvars(), "variable count mismatch");
    let da = a.exterior_derivative();
    let term1 = interior_product(v, &da);
    if a.formdeg == 0 {
        // d(i_v a) is absent for 0-forms; L_v reduces to v applied to the
        // coefficient.
        return term1;
    }
    let term2 = interior_product(v, a).exterior_derivative();
    term1.add(&term2)
}

/// Lie bracket `[v, w] = v(w) - w(v)` componentwise.
pub fn lie_bracket(v: &PVec, w: &PVec) -> PVec {
    assert_eq!(v.nvars(), w.nvars(), "variable count mismatch");
    let comps = (0..v.nvars())
        .map(|i| &v.apply(w.comp(i)) - &w.apply(v.comp(i)))
        .collect();
    PVec::new(comps)
}

/// Pull back a form under the polynomial map with components `fs`
/// (N_target polynomials in N_source variables): substitute coefficients and
/// send `dx_i` to `d(fs[i])`.
pub fn pullback(fs: &[Poly], a: &PForm) -> PForm {
    assert_eq!(
        fs.len(),
        a.nvars(),
        "map component count must equal form variable count"
    );
    let src = fs.first().map(|p| p.nvars()).unwrap_or(1);
    assert!(
        fs.iter().all(|p| p.nvars() == src),
        "map component variable counts differ"
    );
    assert!(a.formdeg <= src, "form degree exceeds source dimension");
    // Differentials of the components, computed once.
    let dfs: Vec<PForm> = fs
        .iter()
        .map(|p| PForm::scalar(p.clone()).exterior_derivative())
        .collect();
    let mut out = PForm::zero(src, a.formdeg);
    for (k, p) in &a.comps {
        let mut term = PForm::scalar(p.compose(fs));
        for j in key_indices(*k) {
            term = term.wedge(&dfs[j]);
        }
        out = out.add(&term);
    }
    out
}

/// The unique vector field Z with `da == i_Z(volume)`, defined for forms of
/// degree N-2. The reconstruction identity is checked before returning.
pub fn rotational(a: &PForm) -> PVec {
    let n = a.nvars();
    assert_eq!(a.formdeg(), n - 2, "rotational needs a form of degree N-2");
    let da = a.exterior_derivative();
    let full: Key = ((1u32 << n) - 1) as Key;
    let mut comps = Vec::with_capacity(n);
    for j in 0..n {
        let k = full & !(1u16 << j);
        let c = da.comps.get(&k).cloned().unwrap_or_else(|| Poly::zero(n));
        comps.push(if j % 2 == 0 { c } else { -&c });
    }
    let z = PVec::new(comps);
    debug_assert_eq!(
        interior_product(&z, &volume(n)),
        da,
        "rotational reconstruction"
    );
    z
}

/// Solve `i_Y(volume) == a` for forms of top degree minus one.
pub fn volume_contraction_preimage(a: &PForm) -> PVec {
    let n = a.nvars();
    assert_eq!(a.formdeg(), n - 1, "needs a form of degree N-1");
    let full: Key = ((1u32 << n) - 1) as Key;
    let mut comps = Vec::with_capacity(n);
    for j in 0..n {
        let k = full & !(1u16 << j);
        let c = a.comps.get(&k).cloned().unwrap_or_else(|| Poly::zero(n));
        comps.push(if j % 2 == 0 { c } else { -&c });
    }
    let y = PVec::new(comps);
    debug_assert_eq!(interior_product(&y, &volume(n)), *a);
    y
}

/// Taylor truncation of a form at a base point, stored in shifted
/// coordinates.
#[derive(Clone, Debug)]
pub struct Jet {
    base: Vec<BigRational>,
    order: u32,
    body: PForm,
}

impl Jet {
    pub fn base(&self) -> &[BigRational] {
        &self.base
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    /// The truncated form, in coordinates centered at the base point.
    pub fn body(&self) -> &PForm {
        &self.body
    }

    pub fn is_zero(&self) -> bool {
        self.body.is_zero()
    }
}

/// Degree-<=k Taylor truncation of `a` at `p`, in shifted coordinates.
pub fn jet_at(a: &PForm, p: &[BigRational], order: u32) -> Jet {
    assert_eq!(p.len(), a.nvars(), "point length must equal variable count");
    Jet {
        base: p.to_vec(),
        order,
        body: a.taylor_shift(p, Some(order)),
    }
}

/// The exact degree-r coefficient slice of a jet.
pub fn homogeneous_part(j: &Jet, r: u32) -> PForm {
    assert!(r <= j.order, "slice degree exceeds jet order");
    j.body.homogeneous_slice(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::{int, rat};

    fn x(n: usize, i: usize) -> Poly {
        Poly::var(n, i)
    }

    #[test]
    fn wedge_transposition_sign() {
        // (x0 dx1) ^ (x1 dx0) = -x0 x1 dx0^dx1
        let n = 2;
        let a = PForm::term(n, &[1], x(n, 0));
        let b = PForm::term(n, &[0], x(n, 1));
        let w = a.wedge(&b);
        let expect = PForm::term(n, &[0, 1], -&(&x(n, 0) * &x(n, 1)));
        assert_eq!(w, expect);
    }

    #[test]
    fn odd_forms_square_to_zero() {
        let mut rng = crate::sample::rng(41);
        for _ in 0..20 {
            let a = crate::sample::form(&mut rng, 4, 1, 3, 3);
            assert!(a.wedge(&a).is_zero(), "1-form wedge itself");
            let b = crate::sample::form(&mut rng, 4, 3, 2, 2);
            assert!(b.wedge(&b).is_zero(), "3-form wedge itself");
        }
    }

    #[test]
    fn wedge_top_form() {
        let n = 4;
        let a = PForm::term(n, &[0, 1], Poly::one(n));
        let b = PForm::term(n, &[2, 3], Poly::one(n));
        assert_eq!(a.wedge(&b), volume(n));
    }

    #[test]
    fn graded_commutativity() {
        let mut rng = crate::sample::rng(43);
        for _ in 0..10 {
            let a = crate::sample::form(&mut rng, 4, 1, 2, 3);
            let b = crate::sample::form(&mut rng, 4, 2, 2, 3);
            let ab = a.wedge(&b);
            let ba = b.wedge(&a);
            // deg a * deg b = 2, even: ab == ba
            assert_eq!(ab, ba);
            let c = crate::sample::form(&mut rng, 4, 1, 2, 3);
            assert_eq!(a.wedge(&c), c.wedge(&a).neg(), "odd*odd anticommutes");
        }
    }

    #[test]
    fn exterior_derivative_basics() {
        let n = 2;
        let a = PForm::term(n, &[1], x(n, 0));
        assert_eq!(
            a.exterior_derivative(),
            PForm::term(n, &[0, 1], Poly::one(n))
        );

        let n = 3;
        let b = PForm::term(n, &[2], &x(n, 0) * &x(n, 1));
        let db = b.exterior_derivative();
        let expect = PForm::from_comps(n, 2, vec![(vec![0, 2], x(n, 1)), (vec![1, 2], x(n, 0))]);
        assert_eq!(db, expect);
    }

    #[test]
    fn d_squared_is_zero() {
        let mut rng = crate::sample::rng(47);
        for _ in 0..20 {
            let a = crate::sample::form(&mut rng, 4, 1, 3, 4);
            assert!(a.exterior_derivative().exterior_derivative().is_zero());
            let b = crate::sample::form(&mut rng, 4, 2, 3, 4);
            assert!(b.exterior_derivative().exterior_derivative().is_zero());
        }
    }

    #[test]
    fn leibniz_rule() {
        let mut rng = crate::sample::rng(53);
        for _ in 0..10 {
            let a = crate::sample::form(&mut rng, 3, 1, 2, 3);
            let b = crate::sample::form(&mut rng, 3, 1, 2, 3);
            let lhs = a.wedge(&b).exterior_derivative();
            let rhs = a
                .exterior_derivative()
                .wedge(&b)
                .sub(&a.wedge(&b.exterior_derivative()));
            assert_eq!(lhs, rhs, "d(a^b) = da^b + (-1)^|a| a^db for 1-forms");
        }
    }

    #[test]
    fn interior_radial_on_area() {
        // i_R(dx0^dx1) = x0 dx1 - x1 dx0 in N=2
        let n = 2;
        let r = PVec::radial(n);
        let a = PForm::term(n, &[0, 1], Poly::one(n));
        let got = interior_product(&r, &a);
        let expect = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        assert_eq!(got, expect);
    }

    #[test]
    fn interior_sign_bookkeeping() {
        // i_{d/dz}(dx^dy^dz) = dx^dy
        let n = 3;
        let got = interior_product(&PVec::basis(n, 2), &volume(n));
        assert_eq!(got, PForm::term(n, &[0, 1], Poly::one(n)));
    }

    #[test]
    fn double_contraction_vanishes() {
        let mut rng = crate::sample::rng(59);
        for _ in 0..20 {
            let v = crate::sample::pvec(&mut rng, 4, 2, 3);
            let a = crate::sample::form(&mut rng, 4, 2, 2, 3);
            assert!(interior_product(&v, &interior_product(&v, &a)).is_zero());
        }
    }

    #[test]
    fn interior_is_antiderivation() {
        let mut rng = crate::sample::rng(61);
        for _ in 0..10 {
            let v = crate::sample::pvec(&mut rng, 4, 2, 2);
            let a = crate::sample::form(&mut rng, 4, 1, 2, 2);
            let b = crate::sample::form(&mut rng, 4, 2, 2, 2);
            let lhs = interior_product(&v, &a.wedge(&b));
            let rhs = interior_product(&v, &a)
                .wedge(&b)
                .sub(&a.wedge(&interior_product(&v, &b)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn lie_derivative_radial_scaling() {
        // eta = x0 dx1 - x1 dx0 in N=2: L_R eta = 2 eta (k=1, q=1)
        let n = 2;
        let eta = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        let got = lie_derivative(&PVec::radial(n), &eta);
        assert_eq!(got, eta.scale(&int(2)));
    }

    #[test]
    fn lie_derivative_constant_cases() {
        let n = 3;
        // constant field, constant-coefficient form
        let v = PVec::basis(n, 1);
        let a = PForm::term(n, &[0, 2], Poly::from_int(n, 5));
        assert!(lie_derivative(&v, &a).is_zero());
    }

    #[test]
    fn lie_derivative_is_a_derivation() {
        let mut rng = crate::sample::rng(67);
        for _ in 0..20 {
            let v = crate::sample::pvec(&mut rng, 3, 2, 2);
            let a = crate::sample::form(&mut rng, 3, 1, 2, 2);
            let b = crate::sample::form(&mut rng, 3, 1, 2, 2);
            let lhs = lie_derivative(&v, &a.wedge(&b));
            let rhs = lie_derivative(&v, &a)
                .wedge(&b)
                .add(&a.wedge(&lie_derivative(&v, &b)));
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn bracket_euler_identity() {
        // [R, X] = (d-1) X for homogeneous X; instance d=2: [R, x1^2 d/dx0]
        let n = 2;
        let xfield = PVec::new(vec![&x(n, 1) * &x(n, 1), Poly::zero(n)]);
        let got = lie_bracket(&PVec::radial(n), &xfield);
        assert_eq!(got, xfield.scale(&int(1)), "[R, X] = (2-1) X");
    }

    #[test]
    fn bracket_antisymmetry_and_self() {
        let mut rng = crate::sample::rng(71);
        for _ in 0..10 {
            let v = crate::sample::pvec(&mut rng, 3, 2, 3);
            assert!(lie_bracket(&v, &v).is_zero());
            let w = crate::sample::pvec(&mut rng, 3, 2, 3);
            assert_eq!(lie_bracket(&v, &w), lie_bracket(&w, &v).scale(&int(-1)));
        }
    }

    #[test]
    fn jacobi_identity_for_linear_fields() {
        let mut rng = crate::sample::rng(73);
        for _ in 0..10 {
            let a = crate::sample::linear_pvec(&mut rng, 3);
            let b = crate::sample::linear_pvec(&mut rng, 3);
            let c = crate::sample::linear_pvec(&mut rng, 3);
            let sum = lie_bracket(&a, &lie_bracket(&b, &c))
                .add(&lie_bracket(&b, &lie_bracket(&c, &a)))
                .add(&lie_bracket(&c, &lie_bracket(&a, &b)));
            assert!(sum.is_zero(), "Jacobi identity");
        }
    }

    #[test]
    fn pullback_identity_map() {
        let mut rng = crate::sample::rng(79);
        let id: Vec<Poly> = (0..3).map(|i| Poly::var(3, i)).collect();
        for _ in 0..10 {
            let a = crate::sample::form(&mut rng, 3, 1, 3, 3);
            assert_eq!(pullback(&id, &a), a);
        }
    }

    #[test]
    fn pullback_substitution_chain_rule() {
        // pullback((x0^2, x1^2), x0 dx1) = 2 x0^2 x1 dx1
        let n = 2;
        let f = vec![&x(n, 0) * &x(n, 0), &x(n, 1) * &x(n, 1)];
        let a = PForm::term(n, &[1], x(n, 0));
        let got = pullback(&f, &a);
        let expect = PForm::term(n, &[1], (&(&x(n, 0) * &x(n, 0)) * &x(n, 1)).scale(&int(2)));
        assert_eq!(got, expect);
    }

    #[test]
    fn pullback_commutes_with_d() {
        let mut rng = crate::sample::rng(83);
        for _ in 0..10 {
            let f: Vec<Poly> = (0..3)
                .map(|_| crate::sample::poly(&mut rng, 3, 2, 3))
                .collect();
            let a = crate::sample::form(&mut rng, 3, 1, 2, 3);
            assert_eq!(
                pullback(&f, &a.exterior_derivative()),
                pullback(&f, &a).exterior_derivative()
            );
        }
    }

    #[test]
    fn pullback_functorial_composition() {
        let mut rng = crate::sample::rng(89);
        for _ in 0..5 {
            let f: Vec<Poly> = (0..2)
                .map(|_| crate::sample::poly(&mut rng, 2, 2, 3))
                .collect();
            let g: Vec<Poly> = (0..2)
                .map(|_| crate::sample::poly(&mut rng, 2, 2, 3))
                .collect();
            let gof: Vec<Poly> = g.iter().map(|gi| gi.compose(&f)).collect();
            let a = crate::sample::form(&mut rng, 2, 1, 2, 2);
            assert_eq!(pullback(&gof, &a), pullback(&f, &pullback(&g, &a)));
        }
    }

    #[test]
    fn rotational_basic_example() {
        // a = x dy - y dx in N=3: da = 2 dx^dy, Z = 2 d/dz
        let n = 3;
        let a = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        let z = rotational(&a);
        assert_eq!(z, PVec::basis(n, 2).scale(&int(2)));
    }

    #[test]
    fn rotational_of_closed_form_is_zero() {
        let n = 3;
        // an exact 1-form is closed, so its rotational vanishes
        let a = PForm::scalar(&(&x(n, 0) * &x(n, 1)) * &x(n, 2)).exterior_derivative();
        assert!(rotational(&a).is_zero());
    }

    #[test]
    fn rotational_round_trip() {
        let mut rng = crate::sample::rng(97);
        for _ in 0..20 {
            let a = crate::sample::form(&mut rng, 4, 2, 3, 3);
            let z = rotational(&a);
            assert_eq!(interior_product(&z, &volume(4)), a.exterior_derivative());
        }
    }

    #[test]
    fn radial_double_contraction_vanishes() {
        let mut rng = crate::sample::rng(101);
        let r = PVec::radial(4);
        for _ in 0..10 {
            let a = crate::sample::form(&mut rng, 4, 2, 3, 3);
            assert!(interior_product(&r, &interior_product(&r, &a)).is_zero());
        }
    }

    #[test]
    fn jet_of_pure_degree_form() {
        // coefficients of pure degree d+1=3 at the origin: order-2 jet is zero
        let n = 3;
        let a = PForm::term(n, &[0], &(&x(n, 1) * &x(n, 1)) * &x(n, 1));
        let zero = vec![int(0); n];
        assert!(jet_at(&a, &zero, 2).is_zero());
        let j3 = jet_at(&a, &zero, 3);
        assert_eq!(homogeneous_part(&j3, 3), a);
    }

    #[test]
    fn jet_at_origin_slices_match() {
        let mut rng = crate::sample::rng(103);
        for _ in 0..10 {
            let a = crate::sample::form(&mut rng, 3, 1, 4, 4);
            let zero = vec![int(0); 3];
            let j = jet_at(&a, &zero, 4);
            for r in 0..=4 {
                assert_eq!(homogeneous_part(&j, r), a.homogeneous_slice(r));
            }
        }
    }

    #[test]
    fn jet_taylor_shift_on_line() {
        // (x-1)^2 dx at p=1: order-1 jet is zero, order-2 recovers y^2 dx
        let n = 1;
        let shifted = &x(n, 0) - &Poly::one(n);
        let a = PForm::term(n, &[0], &shifted * &shifted);
        let p = vec![int(1)];
        assert!(jet_at(&a, &p, 1).is_zero());
        let j2 = jet_at(&a, &p, 2);
        assert_eq!(j2.body(), &PForm::term(n, &[0], &x(n, 0) * &x(n, 0)));
    }

    #[test]
    fn cartan_formula_against_componentwise_oracle() {
        // independent componentwise Lie derivative for 1-forms in N=3:
        // (L_v a)_i = sum_j v_j d(a_i)/dx_j + sum_j a_j d(v_j)/dx_i
        let mut rng = crate::sample::rng(107);
        for _ in 0..10 {
            let v = crate::sample::pvec(&mut rng, 3, 2, 3);
            let a = crate::sample::form(&mut rng, 3, 1, 2, 3);
            let mut oracle = PForm::zero(3, 1);
            for i in 0..3 {
                let ai = a.comp(&[i]);
                let mut c = v.apply(&ai);
                for j in 0..3 {
                    c = &c + &(&a.comp(&[j]) * &v.comp(j).partial(i));
                }
                oracle = oracle.add(&PForm::term(3, &[i], c));
            }
            assert_eq!(
                lie_derivative(&v, &a),
                oracle,
                "Cartan vs componentwise formula"
            );
        }
    }

    #[test]
    fn display_normalizes_component_order() {
        let n = 2;
        let a = PForm::from_comps(n, 2, vec![(vec![1, 0], x(n, 0))]);
        assert_eq!(a.to_string(), "-(x0)*dx0^dx1");
        assert_eq!(PForm::zero(3, 1).to_string(), "0");
    }

    #[test]
    fn chart_restriction_drops_the_chart_differential() {
        let n = 3;
        // eta = x0 dx1 - x1 dx0 on C^3, chart x0=1 with renumbering
        // x1 -> y0, x2 -> y1: the restriction is dy0
        let eta = PForm::from_comps(n, 1, vec![(vec![1], x(n, 0)), (vec![0], -&x(n, 1))]);
        let got = eta.chart_restrict(0);
        assert_eq!(got, PForm::term(2, &[0], Poly::one(2)));
        // chart x1=1: the dx1 component drops, leaving -dy0 (y0 = x0)
        let got1 = eta.chart_restrict(1);
        assert_eq!(got1, PForm::term(2, &[0], Poly::from_int(2, -1)));
    }

    #[test]
    fn volume_preimage_solves_contraction() {
        let mut rng = crate::sample::rng(109);
        for _ in 0..10 {
            let y = crate::sample::pvec(&mut rng, 4, 2, 2);
            let a = interior_product(&y, &volume(4));
            assert_eq!(volume_contraction_preimage(&a), y);
        }
    }

    #[test]
    fn lie_derivative_scaled_radial_fixes_homogeneous_radial_forms() {
        // L_{R/(k+q)} a == a whenever i_R a == 0 and coefficients are
        // homogeneous of degree k with form degree q
        let n = 3;
        let xf = PVec::new(vec![Poly::zero(n), Poly::zero(n), Poly::one(n)]);
        let omega = interior_product(&PVec::radial(n), &interior_product(&xf, &volume(n)));
        // coefficients degree 1, q = 1: rho = 1/2
        let got = lie_derivative(&PVec::radial(n).scale(&rat(1, 2)), &omega);
        assert_eq!(got, omega);
    }
}
