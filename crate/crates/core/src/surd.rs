//! Exact arithmetic in the quadratic extension `Q(√d)` for a positive rational `d`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, to_f64};

/// `a + b·√d`. In certificates `d` is always `p1·p2`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Surd {
    a: BigRational,
    b: BigRational,
    d: BigRational,
}

impl Surd {
    pub fn new(a: BigRational, b: BigRational, d: BigRational) -> Self {
        assert!(d.is_positive(), "radicand must be positive");
        Self { a, b, d }
    }

    pub fn rational(a: BigRational, d: &BigRational) -> Self {
        Self::new(a, BigRational::zero(), d.clone())
    }

    /// `b·√d`.
    pub fn root(b: BigRational, d: &BigRational) -> Self {
        Self::new(BigRational::zero(), b, d.clone())
    }

    pub fn zero(d: &BigRational) -> Self {
        Self::rational(BigRational::zero(), d)
    }

    pub fn a(&self) -> &BigRational {
        &self.a
    }

    pub fn b(&self) -> &BigRational {
        &self.b
    }

    pub fn radicand(&self) -> &BigRational {
        &self.d
    }

    /// Exact sign: compare `a²` with `b²d` when the parts disagree.
    pub fn signum(&self) -> i8 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sb == 0 {
            return sa;
        }
        if sa == 0 || sa == sb {
            return sb;
        }
        let lhs = &self.a * &self.a;
        let rhs = &self.b * &self.b * &self.d;
        match lhs.cmp(&rhs) {
            Ordering::Greater => sa,
            Ordering::Less => sb,
            Ordering::Equal => 0,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == 0
    }

    pub fn is_positive(&self) -> bool {
        self.signum() > 0
    }

    pub fn is_nonnegative(&self) -> bool {
        self.signum() >= 0
    }

    /// The rational value, if the `√d` coefficient vanishes or `d` is a perfect square.
    pub fn to_rational(&self) -> Option<BigRational> {
        if self.b.is_zero() {
            return Some(self.a.clone());
        }
        rational_sqrt(&self.d).map(|r| &self.a + &self.b * r)
    }

    pub fn scale(&self, k: &BigRational) -> Self {
        Self::new(&self.a * k, &self.b * k, self.d.clone())
    }

    pub fn add_rational(&self, k: &BigRational) -> Self {
        Self::new(&self.a + k, self.b.clone(), self.d.clone())
    }

    pub fn square(&self) -> Self {
        self * self
    }

    /// Multiplicative inverse via the conjugate.
    pub fn recip(&self) -> Result<Self> {
        let norm = &self.a * &self.a - &self.b * &self.b * &self.d;
        if norm.is_zero() {
            // Only possible when d is a perfect square; fall back to the rational value.
            let v = self
                .to_rational()
                .filter(|v| !v.is_zero())
                .ok_or_else(|| Error::OutOfRange("division by zero".into()))?;
            return Ok(Self::rational(v.recip(), &self.d));
        }
        Ok(Self::new(&self.a / &norm, -&self.b / &norm, self.d.clone()))
    }

    pub fn to_f64(&self) -> f64 {
        to_f64(&self.a) + to_f64(&self.b) * to_f64(&self.d).sqrt()
    }

    /// Parse `a`, `b*sqrt(p1p2)`, `a + b*sqrt(p1p2)` or `a - b*sqrt(p1p2)`.
    pub fn parse(text: &str, d: &BigRational) -> Result<Self> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let bad = || Error::Parse(format!("not a surd literal: {text:?}"));
        let Some(body) = t.strip_suffix("*sqrt(p1p2)") else {
            return Ok(Self::rational(parse_rational(&t)?, d));
        };
        // Split off the rational part at the last top-level sign that is not leading.
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(i, c)| (c == '+' || c == '-') && !body[..i].ends_with('/'))
            .map(|(i, _)| i)
            .last();
        let (a, b) = match split {
            Some(i) => {
                let a = parse_rational(&body[..i])?;
                let coeff = &body[i..];
                let b = if let Some(rest) = coeff.strip_prefix('+') {
                    parse_rational(rest)?
                } else {
                    parse_rational(coeff)?
                };
                (a, b)
            }
            None => (BigRational::zero(), parse_rational(body).map_err(|_| bad())?),
        };
        Ok(Self::new(a, b, d.clone()))
    }

    fn same_field(&self, other: &Self) {
        debug_assert_eq!(self.d, other.d, "surds from different fields");
    }
}

fn sign(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Exact square root of a non-negative rational, if it is a perfect square.
pub fn rational_sqrt(x: &BigRational) -> Option<BigRational> {
    if x.is_negative() {
        return None;
    }
    let n = x.numer().sqrt();
    let d = x.denom().sqrt();
    (&n * &n == *x.numer() && &d * &d == *x.denom()).then(|| BigRational::new(n, d))
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.a.is_zero(), self.b.is_zero()) {
            (_, true) => write!(f, "{}", format_rational(&self.a)),
            (true, false) => write!(f, "{}*sqrt(p1p2)", format_rational(&self.b)),
            (false, false) if self.b.is_negative() => write!(
                f,
                "{} - {}*sqrt(p1p2)",
                format_rational(&self.a),
                format_rational(&-&self.b)
            ),
            (false, false) => write!(
                f,
                "{} + {}*sqrt(p1p2)",
                format_rational(&self.a),
                format_rational(&self.b)
            ),
        }
    }
}

impl fmt::Debug for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} [p1p2={}]", self, self.d)
    }
}

impl PartialOrd for Surd {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        if self.d != other.d {
            return None;
        }
        Some((self - other).signum().cmp(&0))
    }
}

impl Add for &Surd {
    type Output = Surd;
    fn add(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        Surd::new(&self.a + &rhs.a, &self.b + &rhs.b, self.d.clone())
    }
}

impl Sub for &Surd {
    type Output = Surd;
    fn sub(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        Surd::new(&self.a - &rhs.a, &self.b - &rhs.b, self.d.clone())
    }
}

impl Mul for &Surd {
    type Output = Surd;
    fn mul(self, rhs: &Surd) -> Surd {
        self.same_field(rhs);
        Surd::new(
            &self.a * &rhs.a + &self.b * &rhs.b * &self.d,
            &self.a * &rhs.b + &self.b * &rhs.a,
            self.d.clone(),
        )
    }
}

impl Neg for &Surd {
    type Output = Surd;
    fn neg(self) -> Surd {
        Surd::new(-&self.a, -&self.b, self.d.clone())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Surd {
            type Output = Surd;
            fn $m(self, rhs: Surd) -> Surd {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Surd> for Surd {
            type Output = Surd;
            fn $m(self, rhs: &Surd) -> Surd {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl serde::Serialize for Surd {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;
    use proptest::prelude::*;

    fn s(a: (i64, i64), b: (i64, i64), d: (i64, i64)) -> Surd {
        Surd::new(rat(a.0, a.1), rat(b.0, b.1), rat(d.0, d.1))
    }

    #[test]
    fn sign_by_squares() {
        // 1 - √2 < 0, 3/2 - √2 > 0, 2 - √4 = 0
        assert_eq!(s((1, 1), (-1, 1), (2, 1)).signum(), -1);
        assert_eq!(s((3, 2), (-1, 1), (2, 1)).signum(), 1);
        assert_eq!(s((2, 1), (-1, 1), (4, 1)).signum(), 0);
        assert_eq!(s((0, 1), (0, 1), (3, 1)).signum(), 0);
    }

    #[test]
    fn display_and_parse_round_trip() {
        let d = rat(1, 6);
        for (text, a, b) in [
            ("1/4", rat(1, 4), rat(0, 1)),
            ("1/2*sqrt(p1p2)", rat(0, 1), rat(1, 2)),
            ("-1/3 + 1/2*sqrt(p1p2)", rat(-1, 3), rat(1, 2)),
            ("1/3 - 2*sqrt(p1p2)", rat(1, 3), rat(-2, 1)),
        ] {
            let v = Surd::parse(text, &d).unwrap();
            assert_eq!((v.a(), v.b()), (&a, &b), "{text}");
            assert_eq!(v.to_string(), text);
        }
        assert!(Surd::parse("x*sqrt(p1p2)", &d).is_err());
    }

    #[test]
    fn perfect_square_radicand_is_rational() {
        let v = Surd::root(rat(1, 2), &rat(1, 4));
        assert_eq!(v.to_rational(), Some(rat(1, 4)));
        assert_eq!(Surd::root(rat(1, 1), &rat(1, 6)).to_rational(), None);
    }

    fn arb_surd(d: BigRational) -> impl Strategy<Value = Surd> {
        (-20i64..20, 1i64..9, -20i64..20, 1i64..9)
            .prop_map(move |(a, ad, b, bd)| Surd::new(rat(a, ad), rat(b, bd), d.clone()))
    }

    proptest! {
        #[test]
        fn field_ops_agree_with_floats(x in arb_surd(rat(2, 3)), y in arb_surd(rat(2, 3))) {
            let tol = 1e-9;
            prop_assert!(((&x * &y).to_f64() - x.to_f64() * y.to_f64()).abs() < tol * (1.0 + x.to_f64().abs() * y.to_f64().abs()));
            prop_assert!(((&x + &y).to_f64() - (x.to_f64() + y.to_f64())).abs() < tol * 100.0);
            if !x.is_zero() {
                let one = &x * &x.recip().unwrap();
                prop_assert_eq!(one.to_rational(), Some(rat(1, 1)));
            }
            let f = x.to_f64();
            if f.abs() > 1e-9 {
                prop_assert_eq!(x.signum() as f64, f.signum());
            }
        }
    }
}
