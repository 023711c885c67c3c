use std::collections::BTreeMap;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;

use super::rational::{is_unit_interval, rational_sqrt};
use super::{LaurentPoly, ScalarError, Universe};

/// Scalar deformation data: `r`, the multiparameters `q_ij` and the twist
/// factors `f_ij`, indexed from 1.
///
/// Only the upper triangle `i < j` is stored; `q_ji = q_ij^-1` and `q_ii = 1`
/// are produced on access, so the antisymmetry constraints hold by
/// construction.
#[derive(Clone, Debug, PartialEq)]
pub struct DeformationParams {
    n: usize,
    universe: Arc<Universe>,
    r: LaurentPoly,
    sqrt_r: Option<LaurentPoly>,
    q: BTreeMap<(usize, usize), LaurentPoly>,
    f: BTreeMap<(usize, usize), LaurentPoly>,
}

fn pair_names(n: usize, prefix: &str) -> Vec<String> {
    let mut v = Vec::new();
    for i in 1..=n {
        for j in i + 1..=n {
            v.push(format!("{prefix}_{i}{j}"));
        }
    }
    v
}

impl DeformationParams {
    /// All parameters symbolic: universe `r, q_ij, f_ij, l_i`.
    pub fn symbolic(n: usize) -> Self {
        Self::build(n, false)
    }

    /// Like [`symbolic`](Self::symbolic) but over `sqrt_r` with `r = sqrt_r^2`,
    /// which the B series needs for half-integer powers of `r`.
    pub fn symbolic_with_sqrt_r(n: usize) -> Self {
        Self::build(n, true)
    }

    fn build(n: usize, with_sqrt: bool) -> Self {
        assert!(n >= 1, "dimension must be positive");
        let mut names = vec![if with_sqrt {
            "sqrt_r".to_string()
        } else {
            "r".to_string()
        }];
        names.extend(pair_names(n, "q"));
        names.extend(pair_names(n, "f"));
        names.extend((1..=n).map(|i| format!("l_{i}")));
        let universe = Universe::new(names);
        let (r, sqrt_r) = if with_sqrt {
            let s = LaurentPoly::named(&universe, "sqrt_r").unwrap();
            (s.pow(2).unwrap(), Some(s))
        } else {
            (LaurentPoly::named(&universe, "r").unwrap(), None)
        };
        let mut q = BTreeMap::new();
        let mut f = BTreeMap::new();
        for i in 1..=n {
            for j in i + 1..=n {
                q.insert(
                    (i, j),
                    LaurentPoly::named(&universe, &format!("q_{i}{j}")).unwrap(),
                );
                f.insert(
                    (i, j),
                    LaurentPoly::named(&universe, &format!("f_{i}{j}")).unwrap(),
                );
            }
        }
        DeformationParams {
            n,
            universe,
            r,
            sqrt_r,
            q,
            f,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn universe(&self) -> &Arc<Universe> {
        &self.universe
    }

    /// Parse a polynomial in this parameter set's indeterminates.
    pub fn poly(&self, text: &str) -> Result<LaurentPoly, ScalarError> {
        LaurentPoly::parse(&self.universe, text)
    }

    pub fn constant(&self, c: BigRational) -> LaurentPoly {
        LaurentPoly::constant(&self.universe, c)
    }

    pub fn one(&self) -> LaurentPoly {
        LaurentPoly::one(&self.universe)
    }

    pub fn zero(&self) -> LaurentPoly {
        LaurentPoly::zero(&self.universe)
    }

    pub fn r(&self) -> &LaurentPoly {
        &self.r
    }

    pub fn r_inv(&self) -> LaurentPoly {
        self.r.pow(-1).expect("r is an invertible monomial")
    }

    pub fn r_pow(&self, k: i32) -> LaurentPoly {
        self.r.pow(k).expect("r is an invertible monomial")
    }

    /// `r^(twice/2)`; odd `twice` requires a square root of `r`.
    pub fn r_half_pow(&self, twice: i32) -> Result<LaurentPoly, ScalarError> {
        if twice % 2 == 0 {
            return Ok(self.r_pow(twice / 2));
        }
        let s = self
            .sqrt_r
            .as_ref()
            .ok_or_else(|| ScalarError::HalfIntegerPower(format!("{twice}/2")))?;
        Ok(s.pow(twice).expect("sqrt_r is a monomial"))
    }

    pub fn has_sqrt_r(&self) -> bool {
        self.sqrt_r.is_some()
    }

    /// The numeric value of `r`, if it has been fixed.
    pub fn numeric_r(&self) -> Option<BigRational> {
        self.r.as_constant()
    }

    fn check_index(&self, i: usize, j: usize) -> Result<(), ScalarError> {
        if i == 0 || j == 0 || i > self.n || j > self.n {
            return Err(ScalarError::InvalidParameter(format!(
                "index pair ({i},{j}) outside 1..={}",
                self.n
            )));
        }
        Ok(())
    }

    fn lookup(
        map: &BTreeMap<(usize, usize), LaurentPoly>,
        one: LaurentPoly,
        i: usize,
        j: usize,
    ) -> LaurentPoly {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => one,
            Less => map[&(i, j)].clone(),
            Greater => map[&(j, i)].inverse_monomial().expect("monomial parameter"),
        }
    }

    /// `q_ij`, with `q_ji = q_ij^-1` and `q_ii = 1`.
    pub fn q(&self, i: usize, j: usize) -> LaurentPoly {
        self.check_index(i, j).expect("index in range");
        Self::lookup(&self.q, self.one(), i, j)
    }

    /// `f_ij`, with `f_ji = f_ij^-1` and `f_ii = 1`.
    pub fn f(&self, i: usize, j: usize) -> LaurentPoly {
        self.check_index(i, j).expect("index in range");
        Self::lookup(&self.f, self.one(), i, j)
    }

    /// Twisted multiparameter `q_ij f_ij^2`.
    pub fn twisted_q(&self, i: usize, j: usize) -> LaurentPoly {
        let f = self.f(i, j);
        &self.q(i, j) * &(&f * &f)
    }

    /// The length-form coefficient `l_i` as an indeterminate.
    pub fn l(&self, i: usize) -> LaurentPoly {
        LaurentPoly::named(&self.universe, &format!("l_{i}")).expect("l_i in universe")
    }

    fn monomial_check(p: &LaurentPoly, what: &str) -> Result<(), ScalarError> {
        if p.is_monomial() {
            Ok(())
        } else {
            Err(ScalarError::NotMonomial(format!("{what} = {p}")))
        }
    }

    fn set_pair(
        map: &mut BTreeMap<(usize, usize), LaurentPoly>,
        i: usize,
        j: usize,
        value: LaurentPoly,
    ) -> Result<(), ScalarError> {
        if i == j {
            return if value.is_one() {
                Ok(())
            } else {
                Err(ScalarError::InvalidParameter(format!(
                    "diagonal entry ({i},{i}) must be 1"
                )))
            };
        }
        let (key, v) = if i < j {
            ((i, j), value)
        } else {
            ((j, i), value.inverse_monomial().unwrap())
        };
        map.insert(key, v);
        Ok(())
    }

    pub fn with_q(mut self, i: usize, j: usize, value: LaurentPoly) -> Result<Self, ScalarError> {
        self.check_index(i, j)?;
        Self::monomial_check(&value, &format!("q_{i}{j}"))?;
        let value = value.embed(&self.universe)?;
        Self::set_pair(&mut self.q, i, j, value)?;
        Ok(self)
    }

    pub fn with_f(mut self, i: usize, j: usize, value: LaurentPoly) -> Result<Self, ScalarError> {
        self.check_index(i, j)?;
        Self::monomial_check(&value, &format!("f_{i}{j}"))?;
        let value = value.embed(&self.universe)?;
        Self::set_pair(&mut self.f, i, j, value)?;
        Ok(self)
    }

    /// Every `q_ij` (i < j) set to the same monomial.
    pub fn with_all_q(mut self, value: LaurentPoly) -> Result<Self, ScalarError> {
        Self::monomial_check(&value, "q")?;
        for v in self.q.values_mut() {
            *v = value.clone();
        }
        Ok(self)
    }

    /// Every `f_ij` set to 1.
    pub fn identity_twist(mut self) -> Self {
        let one = self.one();
        for v in self.f.values_mut() {
            *v = one.clone();
        }
        self
    }

    /// Fix `r` to a rational in `(0, 1]`. If the new value is a perfect
    /// square the square root is kept as well.
    pub fn with_numeric_r(mut self, r: BigRational) -> Result<Self, ScalarError> {
        if !is_unit_interval(&r) {
            return Err(ScalarError::InvalidParameter(format!(
                "r = {r} must satisfy 0 < r <= 1"
            )));
        }
        self.sqrt_r = rational_sqrt(&r).map(|s| self.constant(s));
        // substitute r in every stored parameter so q = r * f^2 stays consistent
        let old_r = self.r.clone();
        let value = self.constant(r);
        let rebind = |p: &LaurentPoly| -> Result<LaurentPoly, ScalarError> {
            let mut b = BTreeMap::new();
            let u = p.universe().clone();
            if let Some((e, c)) = old_r.as_monomial() {
                if c.is_one() && e.iter().filter(|&&k| k != 0).count() == 1 {
                    let idx = e.iter().position(|&k| k != 0).unwrap();
                    let k = e[idx];
                    // old_r = v^k, bind v to value^(1/k) only when k = 1 or 2
                    let bound = match k {
                        1 => value.clone(),
                        2 => match rational_sqrt(&value.as_constant().unwrap()) {
                            Some(s) => LaurentPoly::constant(&u, s),
                            None => return Ok(p.clone()),
                        },
                        _ => return Ok(p.clone()),
                    };
                    b.insert(super::Var(idx), bound);
                }
            }
            p.substitute(&b)
        };
        for v in self.q.values_mut() {
            *v = rebind(v)?;
        }
        for v in self.f.values_mut() {
            *v = rebind(v)?;
        }
        self.r = value;
        Ok(self)
    }

    /// Replace `q_ij` by `q_ij f_ij^2` and reset the twist to the identity.
    pub fn twisted(&self) -> Self {
        let mut out = self.clone();
        for (&(i, j), v) in out.q.iter_mut() {
            *v = self.twisted_q(i, j);
        }
        out.identity_twist()
    }

    /// Twist factors multiplied pointwise: twisting by `self.f` then by
    /// `other.f` is twisting once by their product.
    pub fn compose_twist(&self, other: &Self) -> Result<Self, ScalarError> {
        let mut out = self.clone();
        for (k, v) in out.f.iter_mut() {
            let w = other.f[k].embed(&self.universe)?;
            *v = &*v * &w;
        }
        Ok(out)
    }

    /// Verify `q_ij q_ji = 1`, `f_ij f_ji = 1` and the range of a numeric `r`.
    pub fn check_invariants(&self) -> Result<(), ScalarError> {
        for i in 1..=self.n {
            for j in 1..=self.n {
                if !(&self.q(i, j) * &self.q(j, i)).is_one()
                    || !(&self.f(i, j) * &self.f(j, i)).is_one()
                {
                    return Err(ScalarError::InvalidParameter(format!(
                        "antisymmetry fails at ({i},{j})"
                    )));
                }
            }
        }
        if let Some(r) = self.numeric_r() {
            if !is_unit_interval(&r) {
                return Err(ScalarError::InvalidParameter(format!(
                    "r = {r} outside (0, 1]"
                )));
            }
        }
        if !self.r.is_monomial() {
            return Err(ScalarError::NotMonomial(format!("r = {}", self.r)));
        }
        Ok(())
    }

    /// Evaluate every parameter at `r = 1`, `q = f = 1`: the undeformed point.
    pub fn undeformed(n: usize) -> Self {
        let p = Self::symbolic(n).identity_twist();
        let one = p.one();
        let p = p.with_all_q(one).unwrap();
        p.with_numeric_r(BigRational::one()).unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn antisymmetry_by_construction() {
        let p = DeformationParams::symbolic(3);
        p.check_invariants().unwrap();
        assert_eq!(p.q(2, 1), p.poly("q_12^-1").unwrap());
        assert!(p.f(3, 3).is_one());
        assert_eq!(p.twisted_q(2, 1), p.poly("q_12^-1*f_12^-2").unwrap());
    }

    #[test]
    fn numeric_r_range() {
        let p = DeformationParams::symbolic(2);
        assert!(p
            .clone()
            .with_numeric_r(BigRational::new(3.into(), 2.into()))
            .is_err());
        assert!(p
            .clone()
            .with_numeric_r(BigRational::new(0.into(), 1.into()))
            .is_err());
        let p = p
            .with_numeric_r(BigRational::new(1.into(), 4.into()))
            .unwrap();
        assert_eq!(p.r_half_pow(1).unwrap(), p.poly("1/2").unwrap());
        p.check_invariants().unwrap();
    }

    #[test]
    fn half_powers() {
        let p = DeformationParams::symbolic(3);
        assert!(matches!(
            p.r_half_pow(1),
            Err(ScalarError::HalfIntegerPower(_))
        ));
        let p = DeformationParams::symbolic_with_sqrt_r(3);
        assert_eq!(p.r_half_pow(-3).unwrap(), p.poly("sqrt_r^-3").unwrap());
        assert_eq!(p.r_inv(), p.poly("sqrt_r^-2").unwrap());
    }

    #[test]
    fn q_tied_to_r_follows_numeric_r() {
        let p = DeformationParams::symbolic(2);
        let r = p.r().clone();
        let p = p
            .with_q(1, 2, r)
            .unwrap()
            .with_numeric_r(BigRational::new(1.into(), 2.into()))
            .unwrap();
        assert_eq!(p.q(1, 2), p.poly("1/2").unwrap());
    }

    #[test]
    fn twisting_and_composition() {
        let p = DeformationParams::symbolic(2);
        let t = p.twisted();
        assert_eq!(t.q(1, 2), p.poly("q_12*f_12^2").unwrap());
        assert!(t.f(1, 2).is_one());
        let g = p.clone().with_f(1, 2, p.poly("r").unwrap()).unwrap();
        let c = p.compose_twist(&g).unwrap();
        assert_eq!(c.f(1, 2), p.poly("f_12*r").unwrap());
        assert!(p.clone().with_f(1, 2, p.poly("1 + r").unwrap()).is_err());
    }

    #[test]
    fn undeformed_point() {
        let p = DeformationParams::undeformed(2);
        assert!(p.r().is_one() && p.q(1, 2).is_one() && p.f(2, 1).is_one());
    }
}
