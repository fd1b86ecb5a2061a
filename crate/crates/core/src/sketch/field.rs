//! Arithmetic in the prime field F_p with p = 2^61 - 1, plus a two-level
//! power table for fast fixed-base exponentiation on the update path.

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn reduce(x: u128) -> u64 {
    // fold twice: x mod 2^61-1
    let lo = (x & P as u128) as u64;
    let hi = (x >> 61) as u64;
    let mut r = lo + hi;
    if r >= P {
        r -= P;
    }
    // hi can be up to ~2^67, so one more fold
    if r >= P {
        r -= P;
    }
    r
}

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    reduce(a as u128 * b as u128)
}

pub fn pow(mut base: u64, mut exp: u64) -> u64 {
    let mut acc = 1u64;
    base %= P;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul(acc, base);
        }
        base = mul(base, base);
        exp >>= 1;
    }
    acc
}

/// Maps a signed count into the field.
#[inline]
pub fn from_i64(c: i64) -> u64 {
    let r = (c % P as i64 + P as i64) as u64;
    if r >= P {
        r - P
    } else {
        r
    }
}

/// Precomputed base^e for e < limit, split as e = hi * 2^half + lo so the
/// hot path costs two loads and one multiply.
#[derive(Clone, Debug)]
pub struct PowTable {
    half: u32,
    lo: Vec<u64>,
    hi: Vec<u64>,
}

impl PowTable {
    pub fn new(base: u64, limit: u64) -> Self {
        let bits = 64 - limit.max(1).leading_zeros() as u32;
        let half = bits.div_ceil(2).max(1);
        let lo_len = 1usize << half;
        let hi_len = ((limit >> half) + 1) as usize;
        let mut lo = Vec::with_capacity(lo_len);
        let mut acc = 1u64;
        for _ in 0..lo_len {
            lo.push(acc);
            acc = mul(acc, base);
        }
        let step = pow(base, lo_len as u64);
        let mut hi = Vec::with_capacity(hi_len);
        let mut acc = 1u64;
        for _ in 0..hi_len {
            hi.push(acc);
            acc = mul(acc, step);
        }
        PowTable { half, lo, hi }
    }

    #[inline]
    pub fn pow(&self, e: u64) -> u64 {
        let lo = (e & ((1 << self.half) - 1)) as usize;
        let hi = (e >> self.half) as usize;
        mul(self.lo[lo], self.hi[hi])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_ops() {
        assert_eq!(add(P - 1, 1), 0);
        assert_eq!(sub(0, 1), P - 1);
        assert_eq!(mul(P - 1, P - 1), 1); // (-1)^2
        assert_eq!(pow(3, 0), 1);
        assert_eq!(pow(3, 5), 243);
        assert_eq!(from_i64(-1), P - 1);
        assert_eq!(from_i64(5), 5);
    }

    #[test]
    fn fermat_little_theorem_spot_checks() {
        for base in [2u64, 12345, 0xdeadbeef] {
            assert_eq!(pow(base, P - 1), 1);
        }
    }

    #[test]
    fn pow_table_agrees_with_pow() {
        let base = 0x1234_5678_9abc_u64;
        let t = PowTable::new(base, 100_000);
        for e in [0u64, 1, 2, 77, 1024, 65535, 99_999, 100_000] {
            assert_eq!(t.pow(e), pow(base, e), "e = {e}");
        }
    }

    #[test]
    fn reduce_holds_for_large_products() {
        for (a, b) in [(P - 2, P - 3), (P - 1, 2), (0x1fff_ffff_ffff_ffff, 12345)] {
            let wide = (a as u128 * b as u128) % P as u128;
            assert_eq!(mul(a, b), wide as u64);
        }
    }
}
