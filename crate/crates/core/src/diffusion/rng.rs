//! Stateless randomness shared by every stochastic component.
//!
//! A random draw is a pure function of `(global_seed, trial_index, entity_id)`,
//! so a trial can be replayed, split across workers, or evaluated by two
//! different engines without any shared generator state.

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// 64 well-mixed bits for the triple.
#[inline]
pub fn hash3(global_seed: u64, trial_index: u64, entity_id: u64) -> u64 {
    let h = mix64(global_seed.wrapping_add(GOLDEN));
    let h = mix64(h ^ trial_index.wrapping_mul(GOLDEN).wrapping_add(0x632b_e59b_d9b4_e019));
    mix64(h ^ entity_id.wrapping_mul(0xd1b5_4a32_d192_ed03).wrapping_add(GOLDEN))
}

/// Uniform deviate in `[0, 1)` built from the top 53 bits of [`hash3`].
#[inline]
pub fn deviate(global_seed: u64, trial_index: u64, entity_id: u64) -> f64 {
    (hash3(global_seed, trial_index, entity_id) >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn stateless() {
        assert_eq!(deviate(7, 3, 11), deviate(7, 3, 11));
    }

    #[test]
    fn range() {
        for e in 0..10_000 {
            let d = deviate(1, 2, e);
            assert!((0.0..1.0).contains(&d));
        }
    }

    // Bound: sd of the mean of 1e6 U(0,1) draws is sqrt(1/12 / 1e6) ~ 2.89e-4,
    // so +/-0.002 is ~6.9 sd.
    #[test]
    fn mean_of_a_million() {
        let sd = (1.0f64 / 12.0 / 1e6).sqrt();
        assert!(0.002 / sd > 6.0);
        let mean = (0..1_000_000u64).map(|e| deviate(42, 0, e)).sum::<f64>() / 1e6;
        assert!((0.498..=0.502).contains(&mean), "mean {mean}");
    }

    // Birthday bound: 1e5 draws over 2^53 values gives ~(1e5)^2 / 2 / 2^53 ~ 5.6e-7
    // expected collisions; fewer than 5 is the acceptance line.
    #[test]
    fn few_collisions_when_any_argument_changes() {
        let expected = 1e10 / 2.0 / 2f64.powi(53);
        assert!(expected < 1e-5);
        let mut seen = HashSet::new();
        let mut collisions = 0;
        for i in 0..100_000u64 {
            // Vary one argument at a time in thirds.
            let (s, t, e) = match i % 3 {
                0 => (i, 0, 0),
                1 => (0, i, 0),
                _ => (0, 0, i),
            };
            if !seen.insert(deviate(s, t, e).to_bits()) {
                collisions += 1;
            }
        }
        assert!(collisions < 5, "{collisions} collisions");
    }

    #[test]
    fn each_argument_matters() {
        let base = deviate(5, 6, 7);
        assert_ne!(base, deviate(4, 6, 7));
        assert_ne!(base, deviate(5, 5, 7));
        assert_ne!(base, deviate(5, 6, 8));
        // Permuting arguments must not collide either.
        assert_ne!(base, deviate(7, 6, 5));
    }
}
