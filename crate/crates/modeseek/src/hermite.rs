//! Probabilists' Hermite polynomials.
//!
//! `He_{m+1}(x) = x He_m(x) - m He_{m-1}(x)`, the variant matching the
//! derivative identity `d^m/dx^m e^{-x^2/2} = (-1)^m He_m(x) e^{-x^2/2}`.

/// Evaluate `He_m(x)` by the three-term recurrence.
pub(crate) fn he(order: usize, x: f64) -> f64 {
    match order {
        0 => 1.0,
        1 => x,
        _ => {
            let (mut prev, mut cur) = (1.0, x);
            for k in 1..order {
                let next = x * cur - k as f64 * prev;
                prev = cur;
                cur = next;
            }
            cur
        }
    }
}
