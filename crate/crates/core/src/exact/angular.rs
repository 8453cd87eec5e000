//! Angular reduction of `F(k1_hat . k2_hat)` to products of one-dimensional
//! moment kernels.
//!
//! With `k_hat = (Y cos phi, Y sin phi, X)`, `Y = sqrt(1 - X^2)`, the
//! direction product is `u = cos(phi1 - phi2) Y1 Y2 + X1 X2`. The pipeline is
//!
//! 1. expand `F(u)` in `cos phi`, `Y1 Y2`, `X1`, `X2`;
//! 2. average over the relative angle (Wallis factors);
//! 3. replace `(Y1 Y2)^(2m)` by `(1 - X1^2)^m (1 - X2^2)^m`;
//! 4. collect `X1^a X2^b` into symmetric pairs `a <= b`.
//!
//! The resulting coefficients `c_ab` satisfy
//! `S_F = int_0^inf dt sum c_ab <X^a>(t) <X^b>(t)` where `<A>` carries the
//! `2 pi` prefactor of the moment functional; see [`crate::kernels`] for the
//! table-normalized kernels.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{int, Rational};
use crate::error::{Error, Result};

/// Highest power of `u` accepted by [`expand_u_polynomial`].
pub const MAX_U_DEGREE: usize = 8;

/// `X1^a X2^b (Y1 Y2)^j cos^c(phi)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AngularMonomial {
    pub a: u32,
    pub b: u32,
    pub j: u32,
    pub c: u32,
}

impl AngularMonomial {
    pub const ONE: Self = Self {
        a: 0,
        b: 0,
        j: 0,
        c: 0,
    };

    pub fn new(a: u32, b: u32, j: u32, c: u32) -> Self {
        Self { a, b, j, c }
    }
}

/// Sparse polynomial over [`AngularMonomial`]s with exact coefficients.
///
/// Zero coefficients are never stored; iteration is in lexicographic
/// `(a, b, j, c)` order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AngularPolynomial {
    terms: BTreeMap<AngularMonomial, Rational>,
}

impl AngularPolynomial {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (AngularMonomial, Rational)>,
    {
        let mut p = Self::new();
        for (m, q) in terms {
            p.add_term(m, q);
        }
        p
    }

    pub fn add_term(&mut self, m: AngularMonomial, q: Rational) {
        if q.is_zero() {
            return;
        }
        let entry = self.terms.entry(m).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.terms.remove(&m);
        }
    }

    pub fn coeff(&self, m: &AngularMonomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AngularMonomial, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Expands `sum_n f[n] u^n` with `u = cos(phi) (Y1 Y2) + X1 X2`.
pub fn expand_u_polynomial(f: &[Rational]) -> Result<AngularPolynomial> {
    if f.is_empty() {
        return Err(Error::EmptyPolynomial);
    }
    let degree = f.iter().rposition(|q| !q.is_zero()).unwrap_or(0);
    if degree > MAX_U_DEGREE {
        return Err(Error::UnsupportedDegree {
            degree,
            max: MAX_U_DEGREE,
        });
    }

    let mut out = AngularPolynomial::new();
    for (n, fnq) in f.iter().enumerate().take(degree + 1) {
        if fnq.is_zero() {
            continue;
        }
        // u^n = sum_k C(n,k) (cos Y1Y2)^k (X1X2)^(n-k)
        for k in 0..=n {
            let m = AngularMonomial::new((n - k) as u32, (n - k) as u32, k as u32, k as u32);
            out.add_term(m, fnq * binomial(n as u32, k as u32));
        }
    }
    Ok(out)
}

/// Applies `(1/2pi) int_0^{2pi} dphi` to every term.
pub fn phi_average(p: &AngularPolynomial) -> AngularPolynomial {
    let mut out = AngularPolynomial::new();
    for (m, q) in p.iter() {
        if let Some(w) = wallis(m.c) {
            out.add_term(AngularMonomial { c: 0, ..*m }, q * w);
        }
    }
    out
}

/// `(1/2pi) int cos^c` : `(c-1)!!/c!!` for even `c`, `None` (zero) for odd.
fn wallis(c: u32) -> Option<Rational> {
    if c % 2 == 1 {
        return None;
    }
    let mut w = Rational::one();
    let mut k = c;
    while k > 0 {
        w *= Rational::new(BigInt::from(k - 1), BigInt::from(k));
        k -= 2;
    }
    Some(w)
}

fn binomial(n: u32, k: u32) -> Rational {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rational::from_integer(acc)
}

/// Runs the full reduction `expand -> phi_average -> Y elimination -> collect`.
pub fn reduce_to_moments(f: &[Rational]) -> Result<MomentPairTable> {
    let averaged = phi_average(&expand_u_polynomial(f)?);
    let mut raw: BTreeMap<(u32, u32), Rational> = BTreeMap::new();
    for (m, q) in averaged.iter() {
        debug_assert_eq!(m.c, 0);
        if m.j % 2 == 1 {
            return Err(Error::OddYExponent(m.j));
        }
        // (Y1 Y2)^(2h) = (1 - X1^2)^h (1 - X2^2)^h
        let h = m.j / 2;
        for p in 0..=h {
            for r in 0..=h {
                let sign = if (p + r) % 2 == 0 { int(1) } else { int(-1) };
                let w = q * binomial(h, p) * binomial(h, r) * sign;
                *raw.entry((m.a + 2 * p, m.b + 2 * r))
                    .or_insert_with(Rational::zero) += w;
            }
        }
    }
    let table = MomentPairTable::from_pairs(raw);
    debug_assert!(table.iter().all(|((a, b), _)| (a + b) % 2 == 0));
    Ok(table)
}

/// Coefficients `c_ab` of `<X^a><X^b>`, keyed by `a <= b`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct MomentPairTable {
    entries: BTreeMap<(u32, u32), Rational>,
}

impl MomentPairTable {
    /// Builds a table from ordered pairs; `(a, b)` and `(b, a)` are merged.
    pub fn from_pairs<I>(pairs: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), Rational)>,
    {
        let mut t = Self::default();
        for ((a, b), q) in pairs {
            t.accumulate(a, b, q);
        }
        t
    }

    fn accumulate(&mut self, a: u32, b: u32, q: Rational) {
        let key = (a.min(b), a.max(b));
        let entry = self.entries.entry(key).or_insert_with(Rational::zero);
        *entry += q;
        if entry.is_zero() {
            self.entries.remove(&key);
        }
    }

    /// Coefficient of `<X^a><X^b>` (symmetric in `a`, `b`).
    pub fn get(&self, a: u32, b: u32) -> Rational {
        self.entries
            .get(&(a.min(b), a.max(b)))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> {
        self.entries.iter().map(|(k, v)| (*k, v))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_exponent(&self) -> u32 {
        self.entries.keys().map(|&(_, b)| b).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> String {
        let doc = TableDoc {
            entries: self
                .iter()
                .map(|((a, b), q)| TableEntry {
                    a,
                    b,
                    num: q.numer().to_string(),
                    den: q.denom().to_string(),
                })
                .collect(),
        };
        serde_json::to_string(&doc).expect("table serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let doc: TableDoc = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        let mut pairs = Vec::with_capacity(doc.entries.len());
        for e in doc.entries {
            let num: BigInt = e
                .num
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator {:?}", e.num)))?;
            let den: BigInt = e
                .den
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator {:?}", e.den)))?;
            if !den.is_positive() {
                return Err(Error::Parse(format!("denominator must be positive, got {den}")));
            }
            pairs.push(((e.a, e.b), Rational::new(num, den)));
        }
        Ok(Self::from_pairs(pairs))
    }
}

impl Add for &MomentPairTable {
    type Output = MomentPairTable;
    fn add(self, rhs: &MomentPairTable) -> MomentPairTable {
        let mut out = self.clone();
        for ((a, b), q) in rhs.iter() {
            out.accumulate(a, b, q.clone());
        }
        out
    }
}

impl Mul<&Rational> for &MomentPairTable {
    type Output = MomentPairTable;
    fn mul(self, s: &Rational) -> MomentPairTable {
        MomentPairTable::from_pairs(self.iter().map(|(k, q)| (k, q * s)))
    }
}

impl fmt::Display for MomentPairTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for ((a, b), q) in self.iter() {
            writeln!(f, "<X^{a}><X^{b}>  {q}")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    entries: Vec<TableEntry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableEntry {
    a: u32,
    b: u32,
    num: String,
    den: String,
}

/// The three polarization polynomials of the dispersion integrals.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PolynomialFamily {
    /// `1 + u^2`
    F1,
    /// `u - u^3`
    F2,
    /// `(1 - u^2)^2`
    F3,
}

impl PolynomialFamily {
    pub const ALL: [Self; 3] = [Self::F1, Self::F2, Self::F3];

    pub fn coefficients(self) -> Vec<Rational> {
        let c: &[i64] = match self {
            Self::F1 => &[1, 0, 1],
            Self::F2 => &[0, 1, 0, -1],
            Self::F3 => &[1, 0, -2, 0, 1],
        };
        c.iter().map(|&n| int(n)).collect()
    }

    pub fn table(self) -> MomentPairTable {
        reduce_to_moments(&self.coefficients()).expect("family polynomials have degree <= 4")
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::F1 => "F1",
            Self::F2 => "F2",
            Self::F3 => "F3",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_uppercase().as_str() {
            "F1" => Some(Self::F1),
            "F2" => Some(Self::F2),
            "F3" => Some(Self::F3),
            _ => None,
        }
    }
}

#[cfg(test)]
fn in_lowest_terms(q: &Rational) -> bool {
    use num_integer::Integer;
    q.numer().gcd(q.denom()).is_one() && q.denom().is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    fn m(a: u32, b: u32, j: u32, c: u32) -> AngularMonomial {
        AngularMonomial::new(a, b, j, c)
    }

    #[test]
    fn expand_linear() {
        let p = expand_u_polynomial(&[int(0), int(1)]).unwrap();
        let want = AngularPolynomial::from_terms([(m(0, 0, 1, 1), int(1)), (m(1, 1, 0, 0), int(1))]);
        assert_eq!(p, want);
    }

    #[test]
    fn expand_constant() {
        let p = expand_u_polynomial(&[int(1)]).unwrap();
        assert_eq!(p, AngularPolynomial::from_terms([(AngularMonomial::ONE, int(1))]));
    }

    #[test]
    fn expand_one_plus_u_squared() {
        let p = expand_u_polynomial(&[int(1), int(0), int(1)]).unwrap();
        let want = AngularPolynomial::from_terms([
            (AngularMonomial::ONE, int(1)),
            (m(0, 0, 2, 2), int(1)),
            (m(1, 1, 1, 1), int(2)),
            (m(2, 2, 0, 0), int(1)),
        ]);
        assert_eq!(p, want);
    }

    #[test]
    fn expand_rejects_high_degree_and_empty() {
        let mut f = vec![int(0); 10];
        f[9] = int(1);
        assert_eq!(
            expand_u_polynomial(&f),
            Err(Error::UnsupportedDegree { degree: 9, max: 8 })
        );
        assert_eq!(expand_u_polynomial(&[]), Err(Error::EmptyPolynomial));
        // trailing zeros do not count towards the degree
        let mut g = vec![int(0); 12];
        g[2] = int(1);
        assert!(expand_u_polynomial(&g).is_ok());
    }

    #[test]
    fn phi_average_wallis() {
        let sq = AngularPolynomial::from_terms([(m(0, 0, 0, 2), int(1))]);
        assert_eq!(
            phi_average(&sq),
            AngularPolynomial::from_terms([(AngularMonomial::ONE, rat(1, 2))])
        );
        let odd = AngularPolynomial::from_terms([(m(0, 0, 0, 1), int(5))]);
        assert!(phi_average(&odd).is_empty());
        let four = AngularPolynomial::from_terms([(m(0, 0, 0, 4), int(1))]);
        assert_eq!(
            phi_average(&four),
            AngularPolynomial::from_terms([(AngularMonomial::ONE, rat(3, 8))])
        );
        assert_eq!(wallis(6), Some(rat(5, 16)));
    }

    #[test]
    fn family_tables() {
        let t1 = PolynomialFamily::F1.table();
        assert_eq!(
            t1,
            MomentPairTable::from_pairs([
                ((0, 0), rat(3, 2)),
                ((0, 2), int(-1)),
                ((2, 2), rat(3, 2)),
            ])
        );
        let t2 = PolynomialFamily::F2.table();
        assert_eq!(
            t2,
            MomentPairTable::from_pairs([
                ((1, 1), rat(-1, 2)),
                ((1, 3), int(3)),
                ((3, 3), rat(-5, 2)),
            ])
        );
        let t3 = PolynomialFamily::F3.table();
        assert_eq!(
            t3,
            MomentPairTable::from_pairs([
                ((0, 0), rat(3, 8)),
                ((0, 2), rat(1, 2)),
                ((0, 4), rat(3, 4)),
                ((2, 2), rat(3, 2)),
                ((2, 4), rat(-15, 2)),
                ((4, 4), rat(35, 8)),
            ])
        );
        for t in [&t1, &t2, &t3] {
            assert!(t.iter().all(|(_, q)| in_lowest_terms(q)));
        }
    }

    #[test]
    fn symmetric_lookup() {
        let t = PolynomialFamily::F1.table();
        assert_eq!(t.get(2, 0), int(-1));
        assert_eq!(t.get(1, 3), int(0));
    }

    #[test]
    fn json_layout() {
        let t = PolynomialFamily::F1.table();
        assert_eq!(
            t.to_json(),
            r#"{"entries":[{"a":0,"b":0,"num":"3","den":"2"},{"a":0,"b":2,"num":"-1","den":"1"},{"a":2,"b":2,"num":"3","den":"2"}]}"#
        );
        assert_eq!(MomentPairTable::from_json(&t.to_json()).unwrap(), t);
    }

    #[test]
    fn json_rejects_bad_input() {
        assert!(MomentPairTable::from_json(r#"{"entries":[{"a":0,"b":0,"num":"1","den":"0"}]}"#).is_err());
        assert!(MomentPairTable::from_json(r#"{"entries":[{"a":0,"b":0,"num":"x","den":"1"}]}"#).is_err());
        assert!(MomentPairTable::from_json(r#"{"entries":[],"extra":1}"#).is_err());
    }

    #[test]
    fn arbitrary_precision_survives_json() {
        let big: BigInt = "123456789012345678901234567890".parse().unwrap();
        let q = Rational::new(big, BigInt::from(7));
        let t = MomentPairTable::from_pairs([((0, 2), q.clone())]);
        assert_eq!(MomentPairTable::from_json(&t.to_json()).unwrap().get(0, 2), q);
    }
}
