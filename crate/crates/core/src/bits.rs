//! Exact-width bit-string labels.
//!
//! A [`Label`] is a sequence of bits stored most-significant first, with an
//! explicit length. Two labels are equal only if both their bits and their
//! lengths agree, so `"0"` and `"00"` are different labels.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Largest label the codecs accept.
pub const MAX_LABEL_BITS: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabelError {
    #[error("value {value} does not fit in {width} bits")]
    Overflow { value: u64, width: u32 },
    #[error("bit range {offset}..{end} is outside a label of {len} bits")]
    OutOfRange { offset: usize, end: usize, len: usize },
    #[error("zero has no minimal binary encoding")]
    Zero,
    #[error("label of {len} bits is longer than {total}")]
    TooLong { len: usize, total: usize },
    #[error("field width {0} exceeds 64 bits")]
    WidthTooLarge(u32),
    #[error("label would exceed {MAX_LABEL_BITS} bits")]
    Capacity,
    #[error("malformed hex label: {0}")]
    BadHex(String),
}

/// `⌈log₂ n⌉`, with `ceil_log2(0) = ceil_log2(1) = 0`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// `⌊log₂ n⌋` for `n ≥ 1`; zero for `n = 0`.
pub fn floor_log2(n: u64) -> u32 {
    if n == 0 {
        0
    } else {
        63 - n.leading_zeros()
    }
}

/// `⌈log₂ max(2, ⌈log₂ n⌉)⌉`, the integer reading of `log log n`.
pub fn loglog(n: u64) -> u32 {
    ceil_log2(u64::from(ceil_log2(n)).max(2))
}

/// Number of bits needed to write any value in `0..=max` (at least one).
pub fn bits_for(max: u64) -> u32 {
    ceil_log2(max.saturating_add(1)).max(1)
}

#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Label {
    // field order matters for the derived ordering: length first, then bits
    len: usize,
    words: Vec<u64>,
}

impl Label {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        Label {
            len: 0,
            words: Vec::with_capacity(bits.div_ceil(64)),
        }
    }

    /// Parses a string of `'0'`/`'1'` characters. Intended for tests and
    /// diagnostics.
    pub fn from_bit_str(s: &str) -> Result<Self, LabelError> {
        let mut label = Label::with_capacity(s.len());
        for c in s.chars() {
            match c {
                '0' => label.push_bit(false)?,
                '1' => label.push_bit(true)?,
                _ => return Err(LabelError::BadHex(s.into())),
            }
        }
        Ok(label)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn bit(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range for {} bits", self.len);
        (self.words[i / 64] >> (63 - i % 64)) & 1 == 1
    }

    pub fn push_bit(&mut self, bit: bool) -> Result<(), LabelError> {
        if self.len >= MAX_LABEL_BITS {
            return Err(LabelError::Capacity);
        }
        if self.len.is_multiple_of(64) {
            self.words.push(0);
        }
        if bit {
            let i = self.len;
            self.words[i / 64] |= 1 << (63 - i % 64);
        }
        self.len += 1;
        Ok(())
    }

    /// Appends `value` as a big-endian field of exactly `width` bits.
    pub fn put_uint(&mut self, value: u64, width: u32) -> Result<(), LabelError> {
        if width > 64 {
            return Err(LabelError::WidthTooLarge(width));
        }
        if width < 64 && value >> width != 0 {
            return Err(LabelError::Overflow { value, width });
        }
        if self.len + width as usize > MAX_LABEL_BITS {
            return Err(LabelError::Capacity);
        }
        if width == 0 {
            return Ok(());
        }
        let used = self.len % 64;
        let aligned = value << (64 - width);
        if used == 0 {
            self.words.push(aligned);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= aligned >> used;
            if used + width as usize > 64 {
                self.words.push(aligned << (64 - used));
            }
        }
        self.len += width as usize;
        Ok(())
    }

    /// Reads the big-endian field of `width` bits starting at `offset`.
    pub fn get_uint(&self, offset: usize, width: u32) -> Result<u64, LabelError> {
        if width > 64 {
            return Err(LabelError::WidthTooLarge(width));
        }
        let end = offset + width as usize;
        if end > self.len {
            return Err(LabelError::OutOfRange {
                offset,
                end,
                len: self.len,
            });
        }
        if width == 0 {
            return Ok(0);
        }
        let word = offset / 64;
        let shift = offset % 64;
        let mut chunk = self.words[word] << shift;
        if shift + width as usize > 64 {
            chunk |= self.words[word + 1] >> (64 - shift);
        }
        Ok(chunk >> (64 - width))
    }

    /// Appends every bit of `other`.
    pub fn append(&mut self, other: &Label) -> Result<(), LabelError> {
        let mut remaining = other.len;
        let mut offset = 0;
        while remaining > 0 {
            let width = remaining.min(64) as u32;
            self.put_uint(other.get_uint(offset, width)?, width)?;
            offset += width as usize;
            remaining -= width as usize;
        }
        Ok(())
    }

    /// The sub-label `offset..offset + width`.
    pub fn slice(&self, offset: usize, width: usize) -> Result<Label, LabelError> {
        if offset + width > self.len {
            return Err(LabelError::OutOfRange {
                offset,
                end: offset + width,
                len: self.len,
            });
        }
        let mut out = Label::with_capacity(width);
        let mut done = 0;
        while done < width {
            let w = (width - done).min(64) as u32;
            out.put_uint(self.get_uint(offset + done, w)?, w)?;
            done += w as usize;
        }
        Ok(out)
    }

    /// Appends zero bits until the label is exactly `total` bits long.
    pub fn pad_to(&mut self, total: usize) -> Result<(), LabelError> {
        if self.len > total {
            return Err(LabelError::TooLong {
                len: self.len,
                total,
            });
        }
        if total > MAX_LABEL_BITS {
            return Err(LabelError::Capacity);
        }
        self.len = total;
        self.words.resize(total.div_ceil(64), 0);
        Ok(())
    }

    /// Hex digits, MSB first; the final nibble is zero-padded. Empty labels
    /// give an empty string.
    pub fn to_hex(&self) -> String {
        const DIGITS: &[u8; 16] = b"0123456789abcdef";
        let nibbles = self.len.div_ceil(4);
        let mut out = String::with_capacity(nibbles);
        for k in 0..nibbles {
            let word = self.words[k / 16];
            let nib = (word >> (60 - 4 * (k % 16))) & 0xf;
            out.push(DIGITS[nib as usize] as char);
        }
        out
    }

    /// Inverse of [`Label::to_hex`]. Padding bits in the last nibble must be
    /// zero.
    pub fn from_hex(bit_len: usize, hex: &str) -> Result<Self, LabelError> {
        if bit_len > MAX_LABEL_BITS {
            return Err(LabelError::Capacity);
        }
        if hex.len() != bit_len.div_ceil(4) {
            return Err(LabelError::BadHex(hex.into()));
        }
        let mut label = Label::with_capacity(bit_len);
        for c in hex.chars() {
            let nib = c.to_digit(16).ok_or_else(|| LabelError::BadHex(hex.into()))?;
            label.put_uint(u64::from(nib), 4)?;
        }
        let padding = label.len - bit_len;
        if padding > 0 && label.get_uint(bit_len, padding as u32)? != 0 {
            return Err(LabelError::BadHex(hex.into()));
        }
        label.len = bit_len;
        label.words.truncate(bit_len.div_ceil(64));
        Ok(label)
    }
}

/// The binary representation of `value` without leading zeros.
pub fn minimal_binary(value: u64) -> Result<Label, LabelError> {
    if value == 0 {
        return Err(LabelError::Zero);
    }
    let width = floor_log2(value) + 1;
    let mut label = Label::with_capacity(width as usize);
    label.put_uint(value, width)?;
    Ok(label)
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Label(\"")?;
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        write!(f, "\")")
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.bit(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

/// Packs equal-width fields into one label.
pub fn pack_fields(fields: &[u64], width: u32) -> Result<Label, LabelError> {
    let mut label = Label::with_capacity(fields.len() * width as usize);
    for &f in fields {
        label.put_uint(f, width)?;
    }
    Ok(label)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use proptest::prelude::*;

    fn bits(s: &str) -> Label {
        Label::from_bit_str(s).unwrap()
    }

    #[test]
    fn put_uint_examples() {
        let mut l = Label::new();
        l.put_uint(0, 1).unwrap();
        assert_eq!(l, bits("0"));

        let mut l = Label::new();
        l.put_uint(5, 3).unwrap();
        assert_eq!(l, bits("101"));

        let mut l = Label::new();
        assert_eq!(
            l.put_uint(5, 2),
            Err(LabelError::Overflow { value: 5, width: 2 })
        );
        assert!(l.is_empty());
    }

    #[test]
    fn get_uint_examples() {
        assert_eq!(bits("101").get_uint(0, 3), Ok(5));
        assert!(matches!(
            bits("10").get_uint(1, 2),
            Err(LabelError::OutOfRange { .. })
        ));
        assert_eq!(bits("10").get_uint(2, 0), Ok(0));
    }

    #[test]
    fn minimal_binary_examples() {
        assert_eq!(minimal_binary(1).unwrap(), bits("1"));
        let six = minimal_binary(6).unwrap();
        assert_eq!(six, bits("110"));
        assert_eq!(six.len(), 3);
        assert_eq!(minimal_binary(0), Err(LabelError::Zero));
    }

    #[test]
    fn pad_to_examples() {
        let mut l = bits("1");
        l.pad_to(3).unwrap();
        assert_eq!(l, bits("100"));

        let mut l = bits("101");
        l.pad_to(3).unwrap();
        assert_eq!(l, bits("101"));

        let mut l = bits("1010");
        assert_eq!(l.pad_to(3), Err(LabelError::TooLong { len: 4, total: 3 }));
    }

    #[test]
    fn length_is_part_of_identity() {
        assert_ne!(bits("0"), bits("00"));
        assert_ne!(Label::new(), bits("0"));
    }

    #[test]
    fn log_helpers() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(10), 4);
        assert_eq!(ceil_log2(16), 4);
        assert_eq!(ceil_log2(17), 5);
        assert_eq!(ceil_log2(1_000_000), 20);
        assert_eq!(floor_log2(1), 0);
        assert_eq!(floor_log2(6), 2);
        assert_eq!(loglog(1), 1);
        assert_eq!(loglog(16), 2);
        assert_eq!(loglog(17), 3);
        assert_eq!(loglog(1 << 16), 4);
        assert_eq!(bits_for(0), 1);
        assert_eq!(bits_for(4), 3);
    }

    #[test]
    fn hex_examples() {
        assert_eq!(bits("00").to_hex(), "0");
        assert_eq!(bits("101").to_hex(), "a");
        assert_eq!(bits("11111").to_hex(), "f8");
        assert_eq!(Label::from_hex(5, "f8").unwrap(), bits("11111"));
        assert!(Label::from_hex(5, "f9").is_err());
        assert!(Label::from_hex(5, "f").is_err());
        assert_eq!(Label::from_hex(0, "").unwrap(), Label::new());
    }

    #[test]
    fn slice_and_append_cross_word_boundaries() {
        let mut l = Label::new();
        for i in 0..10u64 {
            l.put_uint(i * 7919 % 8191, 13).unwrap();
        }
        let mut joined = l.slice(0, 61).unwrap();
        joined.append(&l.slice(61, l.len() - 61).unwrap()).unwrap();
        assert_eq!(joined, l);
        assert_eq!(l.to_string().len(), 130);
    }

    proptest! {
        #[test]
        fn put_get_round_trip(w in 1u32..=62, raw in any::<u64>(), prefix in 0usize..130) {
            let x = raw & ((1u64 << w) - 1);
            let mut l = Label::new();
            l.pad_to(prefix).unwrap();
            l.put_uint(x, w).unwrap();
            prop_assert_eq!(l.len(), prefix + w as usize);
            prop_assert_eq!(l.get_uint(prefix, w).unwrap(), x);

            let mut fresh = Label::new();
            fresh.put_uint(x, w).unwrap();
            prop_assert_eq!(fresh.get_uint(0, w).unwrap(), x);
        }

        #[test]
        fn hex_round_trip(bitv in proptest::collection::vec(any::<bool>(), 0..4096)) {
            let mut l = Label::new();
            for b in &bitv {
                l.push_bit(*b).unwrap();
            }
            let back = Label::from_hex(l.len(), &l.to_hex()).unwrap();
            prop_assert_eq!(back.len(), bitv.len());
            prop_assert_eq!(back, l);
        }

        #[test]
        fn ordering_matches_serialized_form(
            a in proptest::collection::vec(any::<bool>(), 0..80),
            b in proptest::collection::vec(any::<bool>(), 0..80),
        ) {
            let mk = |v: &[bool]| {
                let mut l = Label::new();
                for &x in v { l.push_bit(x).unwrap(); }
                l
            };
            let (la, lb) = (mk(&a), mk(&b));
            let key = |l: &Label| (l.len(), l.to_hex());
            prop_assert_eq!(la.cmp(&lb), key(&la).cmp(&key(&lb)));
            prop_assert_eq!(la == lb, a == b);
        }
    }
}
