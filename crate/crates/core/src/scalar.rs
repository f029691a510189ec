//! Scalar types: integer edge weights / distances and exact rationals.

use std::fmt::{Debug, Display};
use std::hash::Hash;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, PrimInt, Unsigned};

/// Exact rational used for α, β, ε and the sparsity constant.
pub type Rational = Ratio<i64>;

/// Edge weight and distance scalar. Implemented for the unsigned integers.
pub trait Weight:
    PrimInt + Unsigned + CheckedAdd + Hash + Debug + Display + Default + Send + Sync + 'static
{
    fn from_u64(v: u64) -> Option<Self> {
        <Self as num_traits::NumCast>::from(v)
    }

    fn as_u64(self) -> u64 {
        self.to_u64().expect("unsigned weight fits in u64")
    }
}

impl<T> Weight for T where
    T: PrimInt + Unsigned + CheckedAdd + Hash + Debug + Display + Default + Send + Sync + 'static
{
}

/// Parses `"p/q"`, `"p"` or a finite decimal such as `"1.5"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p = i64::from_str(p.trim()).ok()?;
        let q = i64::from_str(q.trim()).ok()?;
        if q == 0 {
            return None;
        }
        return Some(Rational::new(p, q));
    }
    if let Some((int, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) || frac.len() > 12 {
            return None;
        }
        let negative = int.starts_with('-');
        let int_part = i64::from_str(int).ok()?.abs();
        let scale = 10i64.pow(frac.len() as u32);
        let frac_part = i64::from_str(frac).ok()?;
        let num = int_part.checked_mul(scale)?.checked_add(frac_part)?;
        return Some(Rational::new(if negative { -num } else { num }, scale));
    }
    i64::from_str(s).ok().map(Rational::from_integer)
}

/// Renders as `"p/q"`, or `"p"` for integers.
pub fn render_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `ceil(log2(x))` for `x >= 1`; 0 for `x <= 1`.
pub fn ceil_log2(x: u64) -> u32 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros()
    }
}

/// `log2(x)` when `x` is a power of two.
pub fn exact_log2(x: u64) -> Option<u32> {
    x.is_power_of_two().then(|| x.trailing_zeros())
}
