//! JSON shapes shared by several subcommands. Rationals are `{num, den}`
//! and complex numbers `{re, im}`.

use kolakoski::coincidence::CoincidenceCertificate;
use kolakoski::model_set::LatticeCoset;
use kolakoski::Substitution;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::ToPrimitive;
use serde_json::{json, Value};

fn big(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => json!(v),
        None => json!(x.to_string()),
    }
}

/// Falls back to decimal strings if a part does not fit in `i64`.
pub fn rational(r: &BigRational) -> Value {
    json!({ "num": big(r.numer()), "den": big(r.denom()) })
}

pub fn rational64(r: Rational64) -> Value {
    json!({ "num": r.numer(), "den": r.denom() })
}

pub fn complex(z: Complex64) -> Value {
    json!({ "re": clean(z.re), "im": clean(z.im) })
}

/// Drops the sign of negative zero so equal runs print equal bytes.
pub fn clean(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

pub fn coset(c: &LatticeCoset) -> Value {
    json!({ "r": c.level, "modulus": c.modulus(), "residue": c.residue })
}

pub fn certificate(sub: &Substitution, c: &CoincidenceCertificate) -> Value {
    let ell = sub.constant_length().unwrap_or(1);
    json!({
        "k": c.k,
        "digits": c.digits,
        "column": c.column_index(ell),
        "letter": sub.label(c.letter),
    })
}
