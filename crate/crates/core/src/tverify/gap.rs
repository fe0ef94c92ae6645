use crate::error::{Error, Result};

/// Smallest `i0` with `2 < i0 < r_s - 2` such that every later block `r`
/// avoids the window `[r_s³ - (i0+2)·r_s, r_s³ - (i0-1)·r_s]`.
///
/// Each later block rules out at most four candidates, so with fewer than
/// `k + 1` later blocks and `r_s > 5p(k+1)` a valid `i0` always exists.
pub fn select_i0(r_s: u64, later: &[u64], k: u32) -> Result<u64> {
    if later.len() as u64 > u64::from(k) {
        return Err(Error::NoValidGap {
            r_s,
            blocked: later.len(),
        });
    }
    let cube = u128::from(r_s).pow(3);
    let r = u128::from(r_s);
    for i0 in 3..r_s.saturating_sub(2) {
        let i = u128::from(i0);
        let low = cube - (i + 2) * r;
        let high = cube - (i - 1) * r;
        if later.iter().all(|&x| u128::from(x) < low || u128::from(x) > high) {
            return Ok(i0);
        }
    }
    Err(Error::NoValidGap {
        r_s,
        blocked: later.len(),
    })
}
