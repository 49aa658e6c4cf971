//! Nearest-integer gaps `dist(αλ_j, ℤ)` and the non-Liouville condition
//! `|τ − αλ_j| ≥ C j^{−ε}`.
//!
//! Gaps of Liouville-type numbers drop far below `f64` resolution, so `α` may
//! be held as an exact rational and every `λ_j` is converted to its exact
//! dyadic value before multiplying. Magnitudes are reported as `log10`.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral_models::EigenvalueSequence;

/// Default exponent grid; small exponents are the discriminating ones.
pub const DEFAULT_EPSILONS: [f64; 4] = [0.5, 1.0, 2.0, 4.0];

/// A drop of this many decades of `C_ε` below its value at `j = 1` marks a
/// collapse.
const COLLAPSE_DECADES: f64 = 1.0;

/// Digits kept beyond the size of `αλ_J` when checking that an approximated
/// `α` resolves a gap.
const GUARD_DIGITS: f64 = 3.0;

/// The number `α`, either a double or an exact rational `num/den`.
#[derive(Debug, Clone, PartialEq)]
pub enum Alpha {
    Float(f64),
    Rational {
        num: BigInt,
        den: BigInt,
        /// Decimal digits to which `num/den` approximates the intended value;
        /// `None` when it is exact.
        digits: Option<usize>,
        label: String,
    },
}

impl Alpha {
    pub fn float(x: f64) -> Self {
        Self::Float(x)
    }

    pub fn ratio(p: i64, q: i64) -> Result<Self> {
        if q == 0 {
            return Err(Error::InvalidArgument("zero denominator".into()));
        }
        let (num, den) = if q < 0 { (-p, -q) } else { (p, q) };
        Ok(Self::Rational {
            num: num.into(),
            den: den.into(),
            digits: None,
            label: format!("{p}/{q}"),
        })
    }

    /// `√n` truncated to `digits` decimals.
    pub fn sqrt(n: u64, digits: usize) -> Self {
        let scale = BigUint::from(10u32).pow(digits as u32);
        let root = (BigUint::from(n) * &scale * &scale).sqrt();
        let exact = &root * &root == BigUint::from(n) * &scale * &scale;
        Self::Rational {
            num: root.into(),
            den: scale.into(),
            digits: (!exact).then_some(digits),
            label: format!("sqrt({n})"),
        }
    }

    /// Exact value of a decimal literal such as `-0.1250`.
    pub fn decimal(text: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("not a decimal number: {text:?}"));
        let t = text.trim();
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t.strip_prefix('+').unwrap_or(t)),
        };
        let (int, frac) = body.split_once('.').unwrap_or((body, ""));
        if int.is_empty() && frac.is_empty()
            || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit())
        {
            return Err(bad());
        }
        let digits = format!("{int}{frac}");
        let mut num: BigInt = digits.parse().map_err(|_| bad())?;
        if neg {
            num = -num;
        }
        Ok(Self::Rational {
            num,
            den: BigInt::from(10u32).pow(frac.len() as u32),
            digits: None,
            label: t.to_string(),
        })
    }

    /// `Σ_{k=1}^{K} 10^{−k!}` exactly.
    pub fn liouville(depth: u32) -> Self {
        let top = factorial(depth);
        let den = BigInt::from(10u32).pow(top as u32);
        let num = (1..=depth)
            .map(|k| BigInt::from(10u32).pow((top - factorial(k)) as u32))
            .fold(BigInt::zero(), |a, b| a + b);
        Self::Rational {
            num,
            den,
            digits: None,
            label: format!("liouville({depth})"),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::Float(x) => format!("{x}"),
            Self::Rational { label, .. } => label.clone(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Self::Float(x) => *x,
            Self::Rational { num, den, .. } => ratio_to_f64(num, den),
        }
    }

    /// Decimal expansion truncated to `digits` places.
    pub fn to_decimal(&self, digits: usize) -> String {
        match self {
            Self::Float(x) => format!("{x:.digits$}"),
            Self::Rational { num, den, .. } => {
                let scaled = (num.abs() * BigInt::from(10u32).pow(digits as u32)) / den;
                let s = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
                let (i, f) = s.split_at(s.len() - digits);
                let sign = if num.is_negative() { "-" } else { "" };
                if digits == 0 {
                    format!("{sign}{i}")
                } else {
                    format!("{sign}{i}.{f}")
                }
            }
        }
    }
}

fn factorial(k: u32) -> u64 {
    (1..=u64::from(k)).product()
}

fn ln_big(x: &BigInt) -> f64 {
    let mag = x.magnitude();
    let bits = mag.bits();
    if bits <= 1000 {
        return mag.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (mag >> shift).to_f64().unwrap_or(f64::INFINITY).ln() + shift as f64 * std::f64::consts::LN_2
}

fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    // 66-bit quotient with a sticky bit, then one rounding to 53 bits
    let shift = 66 + den.bits() as i64 - num.bits() as i64;
    let (n, d) = (num.magnitude(), den.magnitude());
    let (q, r): (BigUint, BigUint) = if shift >= 0 {
        (n << shift as usize).div_rem(d)
    } else {
        n.div_rem(&(d << (-shift) as usize))
    };
    let q: BigUint = if r.is_zero() { q << 1u32 } else { (q << 1u32) | BigUint::one() };
    let v = libm::scalbn(q.to_f64().unwrap_or(f64::INFINITY), -(shift as i32) - 1);
    if (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus) {
        -v
    } else {
        v
    }
}

/// Exact dyadic rational `(m, 2^k)` equal to a finite double.
fn f64_to_ratio(x: f64) -> (BigInt, BigInt) {
    if x == 0.0 {
        return (BigInt::zero(), BigInt::one());
    }
    let bits = x.to_bits();
    let sign = if bits >> 63 == 1 { -1 } else { 1 };
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (mant, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    let m = BigInt::from(mant) * sign;
    if e >= 0 {
        (m << e as usize, BigInt::one())
    } else {
        (m, BigInt::one() << (-e) as usize)
    }
}

/// `τ = round(αλ)` and `|τ − αλ|` in double precision.
pub fn nearest_integer_gap(alpha: f64, lambda: f64) -> (i64, f64) {
    let x = alpha * lambda;
    let tau = x.round();
    (tau as i64, (tau - x).abs())
}

/// Exact nearest integer and gap for `α·x`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactGap {
    pub tau: BigInt,
    /// `log10 |τ − αx|` (`−∞` for a zero gap).
    pub log10_gap: f64,
    /// `log10 |αx|`, used to judge whether an approximate `α` suffices.
    pub log10_size: f64,
}

impl ExactGap {
    pub fn gap(&self) -> f64 {
        10f64.powf(self.log10_gap)
    }
}

fn nearest_of_ratio(p: &BigInt, q: &BigInt) -> (BigInt, BigInt) {
    // τ = ⌊(2p + q) / 2q⌋, remainder |p − τq|
    let two = BigInt::from(2u32);
    let tau = (&two * p + q).div_floor(&(&two * q));
    let rem = (p - &tau * q).abs();
    (tau, rem)
}

fn log10_ratio(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        f64::NEG_INFINITY
    } else {
        (ln_big(num) - ln_big(den)) / std::f64::consts::LN_10
    }
}

/// Gap of `α·x` for an exact rational `x = xn/xd`.
pub fn exact_gap(alpha: &Alpha, xn: &BigInt, xd: &BigInt) -> Result<ExactGap> {
    let (p, q) = match alpha {
        Alpha::Float(a) => {
            let (an, ad) = f64_to_ratio(*a);
            (an * xn, ad * xd)
        }
        Alpha::Rational { num, den, .. } => (num * xn, den * xd),
    };
    let (tau, rem) = nearest_of_ratio(&p, &q);
    let g = ExactGap {
        tau,
        log10_gap: log10_ratio(&rem, &q),
        log10_size: log10_ratio(&p, &q),
    };
    if let Alpha::Rational {
        digits: Some(d), ..
    } = alpha
    {
        // the truncation error of α is scaled by x; it must sit well below the gap
        let err = -(*d as f64) + log10_ratio(xn, xd).max(0.0);
        if g.log10_gap < err + GUARD_DIGITS {
            return Err(Error::Precision {
                required: (-(g.log10_gap) + log10_ratio(xn, xd).max(0.0) + GUARD_DIGITS).ceil().max(0.0)
                    as usize
                    + 1,
                available: *d,
            });
        }
    }
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapEntry {
    pub j: usize,
    pub tau: i128,
    pub gap: f64,
    pub log10_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpsilonFit {
    pub epsilon: f64,
    /// `C_ε = inf_{j ≤ J} j^ε gap_j` (0 when it underflows or a gap vanishes).
    pub c: f64,
    pub log10_c: f64,
    pub argmin_j: usize,
    /// `(J_k, log10 C_ε(J_k))` at `J_k = 1, 2, 4, …` and at `J`.
    pub checkpoints: Vec<(usize, f64)>,
    pub collapsed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DiophantineVerdict {
    /// Evidence only: the condition is checked for `j ≤ J`.
    HoldsUpTo { j: usize, epsilon: f64, c: f64 },
    FailsEvidence { reason: String, witness: Vec<usize> },
}

impl DiophantineVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, Self::HoldsUpTo { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiophantineReport {
    pub alpha: String,
    #[serde(rename = "J")]
    pub j_max: usize,
    pub epsilons: Vec<f64>,
    pub gaps: Vec<GapEntry>,
    pub per_eps: Vec<EpsilonFit>,
    pub verdict: DiophantineVerdict,
}

impl DiophantineReport {
    pub fn fit(&self, epsilon: f64) -> Option<&EpsilonFit> {
        self.per_eps.iter().find(|f| f.epsilon == epsilon)
    }

    /// `(j, gap_j)` rows.
    pub fn gaps_csv(&self) -> String {
        let mut out = String::from("j,tau,gap,log10_gap\n");
        for g in &self.gaps {
            out.push_str(&format!("{},{},{:.17e},{:.17e}\n", g.j, g.tau, g.gap, g.log10_gap));
        }
        out
    }
}

fn checkpoints(j_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = std::iter::successors(Some(1usize), |k| k.checked_mul(2))
        .take_while(|k| *k < j_max)
        .collect();
    out.push(j_max);
    out
}

/// Scans `j ≤ J` and fits `C_ε` for each `ε`. Needs a growth certificate on
/// the spectrum.
pub fn check_condition_a(
    alpha: &Alpha,
    seq: &EigenvalueSequence,
    j_max: usize,
    epsilons: &[f64],
) -> Result<DiophantineReport> {
    seq.require_growth("condition (A)")?;
    if j_max == 0 || j_max > seq.len() {
        return Err(Error::InvalidArgument(format!(
            "J = {j_max} must lie in 1..={}",
            seq.len()
        )));
    }
    if epsilons.is_empty() || epsilons.iter().any(|e| !(*e > 0.0)) {
        return Err(Error::InvalidArgument("epsilons must be nonempty and positive".into()));
    }

    let gaps: Vec<GapEntry> = (1..=j_max)
        .map(|j| -> Result<GapEntry> {
            let (xn, xd) = f64_to_ratio(seq.lambda(j));
            let g = exact_gap(alpha, &xn, &xd)?;
            let tau = g.tau.to_i128().ok_or_else(|| {
                Error::InvalidArgument(format!("nearest integer at j = {j} exceeds 128 bits"))
            })?;
            Ok(GapEntry {
                j,
                tau,
                gap: g.gap(),
                log10_gap: g.log10_gap,
            })
        })
        .collect::<Result<_>>()?;

    let marks = checkpoints(j_max);
    let per_eps: Vec<EpsilonFit> = epsilons
        .iter()
        .map(|&eps| {
            let mut best = (f64::INFINITY, 1usize);
            let mut trace = Vec::with_capacity(marks.len());
            let mut next = 0;
            for g in &gaps {
                let v = eps * (g.j as f64).log10() + g.log10_gap;
                if v < best.0 {
                    best = (v, g.j);
                }
                if marks.get(next) == Some(&g.j) {
                    trace.push((g.j, best.0));
                    next += 1;
                }
            }
            let first = trace[0].1;
            let collapsed = best.0 == f64::NEG_INFINITY || best.0 <= first - COLLAPSE_DECADES;
            EpsilonFit {
                epsilon: eps,
                c: 10f64.powf(best.0),
                log10_c: best.0,
                argmin_j: best.1,
                checkpoints: trace,
                collapsed,
            }
        })
        .collect();

    let zeros: Vec<usize> = gaps
        .iter()
        .filter(|g| g.log10_gap == f64::NEG_INFINITY)
        .map(|g| g.j)
        .collect();
    let verdict = if !zeros.is_empty() {
        DiophantineVerdict::FailsEvidence {
            reason: "zero gap".into(),
            witness: zeros,
        }
    } else if per_eps.iter().all(|f| f.collapsed) {
        let mut witness: Vec<usize> = per_eps.iter().map(|f| f.argmin_j).collect();
        witness.sort_unstable();
        witness.dedup();
        DiophantineVerdict::FailsEvidence {
            reason: "every C_eps collapses".into(),
            witness,
        }
    } else {
        let f = per_eps.iter().find(|f| !f.collapsed).expect("some epsilon survives");
        DiophantineVerdict::HoldsUpTo {
            j: j_max,
            epsilon: f.epsilon,
            c: f.c,
        }
    };

    Ok(DiophantineReport {
        alpha: alpha.label(),
        j_max,
        epsilons: epsilons.to_vec(),
        gaps,
        per_eps,
        verdict,
    })
}

/// Gap of `α j` at `j = 10^{e}` for the identity spectrum `λ_j = j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeGap {
    pub log10_j: u64,
    pub tau: String,
    pub log10_gap: f64,
}

/// Gaps along a sparse subsequence `j = 10^{e}` of the identity spectrum.
pub fn probe_gaps(alpha: &Alpha, log10_indices: &[u64]) -> Result<Vec<ProbeGap>> {
    log10_indices
        .iter()
        .map(|&e| {
            let j = BigInt::from(10u32).pow(e as u32);
            let g = exact_gap(alpha, &j, &BigInt::one())?;
            Ok(ProbeGap {
                log10_j: e,
                tau: g.tau.to_string(),
                log10_gap: g.log10_gap,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateEntry {
    pub k: u32,
    /// `j_k = 10^{k!}`, stored as `k!`.
    pub log10_j: u64,
    pub tau: String,
    pub log10_gap: f64,
    /// `log10(2·10^{k! − (k+1)!})`.
    pub log10_bound: f64,
    pub within_bound: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiouvilleCertificate {
    pub depth: u32,
    pub required_digits: usize,
    pub entries: Vec<CertificateEntry>,
}

impl LiouvilleCertificate {
    /// `log10(j_k^ε gap_k)` along the certificate subsequence.
    pub fn weighted(&self, epsilon: f64) -> Vec<f64> {
        self.entries
            .iter()
            .map(|e| epsilon * e.log10_j as f64 + e.log10_gap)
            .collect()
    }

    pub fn all_within_bound(&self) -> bool {
        self.entries.iter().all(|e| e.within_bound)
    }
}

/// Gaps of the Liouville number `Σ_k 10^{−k!}` at `j_k = 10^{k!}`, `k = 1..=K`.
///
/// The series is cut after `K + 1` terms, the first cut whose gap at `j_K`
/// is nonzero; every reported gap then agrees with that of the full series
/// to relative error below `10^{−(K+2)! + (K+1)!}`. The returned `α` has
/// `(K+1)!` decimals; fewer working digits is a precision error.
pub fn construct_liouville(depth: u32, precision_digits: usize) -> Result<(Alpha, LiouvilleCertificate)> {
    if depth < 2 {
        return Err(Error::InvalidArgument(format!("depth must be at least 2, got {depth}")));
    }
    if depth > 19 {
        return Err(Error::Precision {
            required: usize::MAX,
            available: precision_digits,
        });
    }
    let required = factorial(depth + 1) as usize;
    if precision_digits < required {
        return Err(Error::Precision {
            required,
            available: precision_digits,
        });
    }
    let alpha = Alpha::liouville(depth + 1);
    let entries = (1..=depth)
        .map(|k| -> Result<CertificateEntry> {
            let e = factorial(k);
            let probe = probe_gaps(&alpha, &[e])?.remove(0);
            let log10_bound = 2f64.log10() + e as f64 - factorial(k + 1) as f64;
            Ok(CertificateEntry {
                k,
                log10_j: e,
                tau: probe.tau,
                log10_gap: probe.log10_gap,
                log10_bound,
                within_bound: probe.log10_gap <= log10_bound,
            })
        })
        .collect::<Result<_>>()?;
    Ok((
        alpha,
        LiouvilleCertificate {
            depth,
            required_digits: required,
            entries,
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn nearest_integer_examples() {
        assert_eq!(nearest_integer_gap(0.5, 4.0), (2, 0.0));
        let (t, g) = nearest_integer_gap(2f64.sqrt(), 5.0);
        assert_eq!(t, 7);
        assert!((g - 0.071_067_811_865_475_24).abs() < 1e-14);
        assert_eq!(nearest_integer_gap(0.0, 123.4), (0, 0.0));
    }

    #[test]
    fn exact_gap_agrees_with_double_for_sqrt2() {
        let a = Alpha::sqrt(2, 40);
        for j in 1..200i64 {
            let g = exact_gap(&a, &BigInt::from(j), &BigInt::one()).unwrap();
            let (t, d) = nearest_integer_gap(2f64.sqrt(), j as f64);
            assert_eq!(g.tau, BigInt::from(t));
            assert!((g.gap() - d).abs() < 1e-12);
        }
    }

    #[test]
    fn sqrt2_holds_at_epsilon_one() {
        let seq = EigenvalueSequence::identity(10_000);
        let rep = check_condition_a(&Alpha::sqrt(2, 40), &seq, 10_000, &[1.0]).unwrap();
        let fit = rep.fit(1.0).unwrap();
        // brute-force minimum of j·dist(j√2, ℤ) over j ≤ 10⁴
        let brute = (1..=10_000)
            .map(|j| j as f64 * nearest_integer_gap(2f64.sqrt(), j as f64).1)
            .fold(f64::INFINITY, f64::min);
        assert!((fit.c - brute).abs() < 1e-10);
        assert!(fit.c >= 0.28);
        assert_eq!(fit.argmin_j, 2);
        assert!(rep.verdict.holds());
    }

    #[test]
    fn rational_alpha_fails_at_denominator() {
        let seq = EigenvalueSequence::identity(20);
        let rep = check_condition_a(&Alpha::ratio(3, 7).unwrap(), &seq, 20, &[1.0]).unwrap();
        match rep.verdict {
            DiophantineVerdict::FailsEvidence { witness, .. } => assert_eq!(witness[0], 7),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn liouville_depth_six_fails_for_every_epsilon() {
        let alpha = Alpha::liouville(6);
        let probes: Vec<u64> = (1..=6).map(factorial).collect();
        let gaps = probe_gaps(&alpha, &probes).unwrap();
        for eps in [1.0, 2.0, 5.0, 10.0] {
            let w: Vec<f64> = gaps.iter().map(|g| eps * g.log10_j as f64 + g.log10_gap).collect();
            assert_eq!(*w.last().unwrap(), f64::NEG_INFINITY);
        }
        // dense scan up to 10⁴ sees the j = 100 dip
        let rep = check_condition_a(&alpha, &EigenvalueSequence::identity(10_000), 10_000, &[0.5, 1.0]).unwrap();
        assert!(rep.fit(1.0).unwrap().collapsed);
    }

    #[test]
    fn liouville_construction_examples() {
        let (a, cert) = construct_liouville(3, 24).unwrap();
        assert_eq!(a.to_decimal(6), "0.110001");
        let k2 = &cert.entries[1];
        assert_eq!(k2.log10_j, 2);
        assert_eq!(k2.tau, "11");
        // 100·α − 11 = 0.0001 + 10^{−4}·10^{−18} + …
        assert!((k2.log10_gap + 4.0).abs() < 1e-12);
        let k3 = &cert.entries[2];
        assert_eq!(k3.tau, "110001");
        assert!((k3.log10_gap + 18.0).abs() < 1e-12);
        assert!(cert.all_within_bound());

        let (_, cert2) = construct_liouville(2, 6).unwrap();
        assert!((cert2.entries[1].log10_gap + 4.0).abs() < 1e-12);

        for k in 2..=6 {
            let v = Alpha::liouville(k).to_f64();
            assert!((0.11..0.1101).contains(&v));
        }
        // a cut at depth K has an exactly zero gap at j_K
        let zero = probe_gaps(&Alpha::liouville(3), &[6]).unwrap();
        assert_eq!(zero[0].log10_gap, f64::NEG_INFINITY);
        assert!(matches!(
            construct_liouville(5, 100),
            Err(Error::Precision { required: 720, available: 100 })
        ));
    }

    #[test]
    fn approximate_alpha_reports_missing_precision() {
        let a = Alpha::sqrt(2, 5);
        let seq = EigenvalueSequence::identity(1000);
        assert!(matches!(
            check_condition_a(&a, &seq, 1000, &[1.0]),
            Err(Error::Precision { .. })
        ));
    }

    #[test]
    fn decimal_parsing() {
        assert_eq!(Alpha::decimal("0.5").unwrap().to_f64(), 0.5);
        assert_eq!(Alpha::decimal("-1.25").unwrap().to_decimal(2), "-1.25");
        assert!(Alpha::decimal("abc").is_err());
        assert!(Alpha::decimal(".").is_err());
    }

    #[test]
    fn dyadic_conversion_is_exact() {
        for x in [1.0, 0.1, 3.5e-7, 1e300, 5e-324, 2.885_390_081_777_927] {
            let (n, d) = f64_to_ratio(x);
            assert_eq!(ratio_to_f64(&n, &d), x);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn gap_invariant_under_integer_shift(p in -50i64..50, q in 1i64..50, j in 1i64..1000, shift in -5i64..5) {
                let a = Alpha::ratio(p, q).unwrap();
                let b = Alpha::ratio(p + shift * q, q).unwrap();
                let ga = exact_gap(&a, &BigInt::from(j), &BigInt::one()).unwrap();
                let gb = exact_gap(&b, &BigInt::from(j), &BigInt::one()).unwrap();
                prop_assert_eq!(ga.log10_gap, gb.log10_gap);
            }

            #[test]
            fn gap_is_at_most_half(x in -100.0f64..100.0, l in 0.0f64..1000.0) {
                let (_, g) = nearest_integer_gap(x, l);
                prop_assert!((0.0..=0.5).contains(&g));
                let (n, d) = f64_to_ratio(l);
                let e = exact_gap(&Alpha::float(x), &n, &d).unwrap();
                prop_assert!(e.log10_gap <= 0.5f64.log10() + 1e-12);
            }

            #[test]
            fn fails_verdict_is_monotone_in_j(p in 1i64..40, q in 2i64..40, j1 in 2usize..200, extra in 0usize..200) {
                let seq = EigenvalueSequence::identity(400);
                let a = Alpha::ratio(p, q).unwrap();
                let r1 = check_condition_a(&a, &seq, j1, &DEFAULT_EPSILONS).unwrap();
                let r2 = check_condition_a(&a, &seq, j1 + extra, &DEFAULT_EPSILONS).unwrap();
                if !r1.verdict.holds() {
                    prop_assert!(!r2.verdict.holds());
                }
                for (f1, f2) in r1.per_eps.iter().zip(&r2.per_eps) {
                    prop_assert!(f2.log10_c <= f1.log10_c);
                }
            }

            #[test]
            fn liouville_certificate_inequality(depth in 2u32..6) {
                let (_, cert) = construct_liouville(depth, 1000).unwrap();
                prop_assert!(cert.all_within_bound());
                let top = factorial(depth) as f64;
                let next = factorial(depth + 1) as f64;
                for eps in 1..depth {
                    let inf = cert.weighted(f64::from(eps)).into_iter().fold(f64::INFINITY, f64::min);
                    prop_assert!(inf <= 2f64.log10() + top * f64::from(eps + 1) - next);
                }
            }
        }
    }
}
