//! The Thue-Morse sequence and its signed coefficient stream.

/// Returns the Thue-Morse bit `t_i`.
///
/// `t_i` is the parity of the number of ones in the binary expansion of `i`,
/// which is equivalent to the recurrence `t_0 = 0`, `t_{2n} = t_n`,
/// `t_{2n+1} = 1 - t_n`.
pub fn tm_bit(i: u64) -> u8 {
    (i.count_ones() & 1) as u8
}

/// Returns `(-1)^{t_i}` as `+1` or `-1`.
pub fn tm_sign(i: u64) -> i32 {
    if tm_bit(i) == 0 {
        1
    } else {
        -1
    }
}
