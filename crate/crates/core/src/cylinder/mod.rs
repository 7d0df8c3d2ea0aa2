//! The uniform measure on cylinder sets of `Z_q`, with values in `Q_p`.
//!
//! A sequence `(x_1, x_2, ...)` of base-q digits is identified with the q-adic
//! integer `x_1 + x_2 q + x_3 q^2 + ...`. Only the clopen field is handled; the
//! maximal extension of a measure to its integrable sets is not computed.

mod clopen;
mod integrate;
mod measure;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

pub use clopen::Clopen;
pub use integrate::{
    check_shrinking_chain, integrate_continuous, integrate_step, step_norm, ChainReport,
    ContinuousMap, Integral, StepFunction,
};
pub use measure::{
    indicator_norm, measure, measure_norm, n_mu, CylinderMeasure, TableMeasure, UniformMeasure,
};

use crate::error::Result;
use crate::prime::Prime;

/// `x_1 + x_2 q + ... + x_n q^(n-1)`.
pub fn encode_jq(prefix: &[u32], q: Prime) -> Result<BigUint> {
    clopen::check_digits(prefix, q)?;
    Ok(prefix
        .iter()
        .rev()
        .fold(BigUint::zero(), |acc, &d| acc * q.get() + d))
}

/// The first `depth` base-q digits of `n`.
pub fn decode_jq(n: &BigUint, depth: usize, q: Prime) -> Vec<u32> {
    let base = BigUint::from(q.get());
    let mut n = n.clone();
    (0..depth)
        .map(|_| {
            let (quot, rem) = n.div_rem(&base);
            n = quot;
            rem.to_u32().expect("digit below q")
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn jq_round_trip() {
        let q2 = Prime::new(2).unwrap();
        assert_eq!(encode_jq(&[1, 0, 1], q2).unwrap(), BigUint::from(5u32));
        assert_eq!(decode_jq(&BigUint::from(5u32), 3, q2), vec![1, 0, 1]);
        assert_eq!(encode_jq(&[], q2).unwrap(), BigUint::zero());
        assert!(matches!(encode_jq(&[2], q2), Err(Error::DigitRange { .. })));
        let q5 = Prime::new(5).unwrap();
        let w = vec![4, 0, 3, 3, 1, 0, 0];
        assert_eq!(decode_jq(&encode_jq(&w, q5).unwrap(), w.len(), q5), w);
    }
}
