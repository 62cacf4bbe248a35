//! Small-set helpers: subsets of a ground set of at most 64 elements packed into a `u64`.

pub const MAX_MASK_ELEMENTS: usize = 64;

pub fn mask_of(elements: &[usize]) -> u64 {
    elements.iter().fold(0, |acc, &e| acc | (1u64 << e))
}

pub fn elements(mask: u64) -> Vec<usize> {
    iter(mask).collect()
}

pub fn iter(mut mask: u64) -> impl Iterator<Item = usize> {
    std::iter::from_fn(move || {
        if mask == 0 {
            return None;
        }
        let e = mask.trailing_zeros() as usize;
        mask &= mask - 1;
        Some(e)
    })
}

pub fn full(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// All `k`-subsets of `[n]` in increasing numeric order (Gosper's hack).
pub fn combinations(n: usize, k: usize) -> impl Iterator<Item = u64> {
    let limit = 1u128 << n.min(64);
    let mut next = (k <= n).then(|| (1u128 << k) - 1);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 {
            None
        } else {
            let low = current & current.wrapping_neg();
            let ripple = current + low;
            let candidate = (((ripple ^ current) >> 2) / low) | ripple;
            (candidate < limit).then_some(candidate)
        };
        Some(current as u64)
    })
}

/// All submasks of `mask`, including 0 and `mask` itself.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 { None } else { Some((current - 1) & mask) };
        Some(current)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combinations_count() {
        assert_eq!(combinations(5, 2).count(), 10);
        assert_eq!(combinations(64, 2).count(), 2016);
        assert_eq!(combinations(64, 64).collect::<Vec<_>>(), vec![u64::MAX]);
        assert_eq!(combinations(3, 0).collect::<Vec<_>>(), vec![0]);
        assert_eq!(combinations(2, 3).count(), 0);
        assert!(combinations(6, 3).all(|m| m.count_ones() == 3));
    }

    #[test]
    fn submask_enumeration_is_complete() {
        let all: Vec<u64> = submasks(0b1011).collect();
        assert_eq!(all.len(), 8);
        assert!(all.contains(&0) && all.contains(&0b1011));
    }

    #[test]
    fn mask_round_trip() {
        assert_eq!(elements(mask_of(&[5, 0, 63])), vec![0, 5, 63]);
    }
}
