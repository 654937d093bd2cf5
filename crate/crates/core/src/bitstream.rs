//! MSB-first bit reader/writer and exp-Golomb codes.
//!
//! Syntax elements are packed back to back with no alignment; the writer
//! zero-pads only once, at the end of the stream.

/// Errors raised while reading or writing bits.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BitError {
    #[error("unexpected end of stream at bit {position} (wanted {wanted} more bits)")]
    EndOfStream { position: usize, wanted: u32 },

    #[error("bit count {0} outside [0, 32]")]
    InvalidWidth(u32),

    #[error("value {value} does not fit in {nbits} bits")]
    ValueTooLarge { value: u64, nbits: u32 },

    #[error("malformed exp-Golomb prefix at bit {0}")]
    MalformedPrefix(usize),
}

/// Largest value accepted by [`BitWriter::write_ue`].
pub const UE_MAX: u32 = (1 << 31) - 1;

#[derive(Debug, Default, Clone)]
pub struct BitWriter {
    buf: Vec<u8>,
    bits: usize,
}

impl BitWriter {
    pub fn new() -> Self {
        Self::default()
    }

    /// Number of bits written so far.
    pub fn bit_len(&self) -> usize {
        self.bits
    }

    pub fn write_bits(&mut self, value: u32, nbits: u32) -> Result<(), BitError> {
        if nbits > 32 {
            return Err(BitError::InvalidWidth(nbits));
        }
        if nbits < 32 && (value as u64) >> nbits != 0 {
            return Err(BitError::ValueTooLarge {
                value: value as u64,
                nbits,
            });
        }
        for i in (0..nbits).rev() {
            self.push_bit((value >> i) & 1 == 1);
        }
        Ok(())
    }

    #[inline]
    pub fn write_bit(&mut self, bit: bool) {
        self.push_bit(bit);
    }

    #[inline]
    fn push_bit(&mut self, bit: bool) {
        let offset = self.bits % 8;
        if offset == 0 {
            self.buf.push(0);
        }
        if bit {
            *self.buf.last_mut().unwrap() |= 0x80 >> offset;
        }
        self.bits += 1;
    }

    /// Unsigned exp-Golomb (order 0).
    pub fn write_ue(&mut self, value: u32) -> Result<(), BitError> {
        if value > UE_MAX {
            return Err(BitError::ValueTooLarge {
                value: value as u64,
                nbits: 31,
            });
        }
        let code = value + 1;
        let len = 32 - code.leading_zeros();
        self.write_bits(0, len - 1)?;
        self.write_bits(code, len)
    }

    /// Signed exp-Golomb: k > 0 maps to 2k-1, k <= 0 to -2k.
    pub fn write_se(&mut self, value: i32) -> Result<(), BitError> {
        self.write_ue(se_to_ue(value)?)
    }

    /// Number of zero bits the final byte will be padded with.
    pub fn padding_bits(&self) -> usize {
        (8 - self.bits % 8) % 8
    }

    /// Returns the zero-padded byte buffer.
    pub fn finish(self) -> Vec<u8> {
        self.buf
    }
}

fn se_to_ue(value: i32) -> Result<u32, BitError> {
    let mapped = if value > 0 {
        2 * value as i64 - 1
    } else {
        -2 * value as i64
    };
    if mapped > UE_MAX as i64 {
        return Err(BitError::ValueTooLarge {
            value: mapped as u64,
            nbits: 31,
        });
    }
    Ok(mapped as u32)
}

/// Length in bits of the exp-Golomb code for `value`.
pub fn ue_len(value: u32) -> u32 {
    let code = value as u64 + 1;
    2 * (63 - code.leading_zeros()) + 1
}

pub fn se_len(value: i32) -> u32 {
    let mapped = if value > 0 {
        2 * value as i64 - 1
    } else {
        -2 * value as i64
    };
    ue_len(mapped as u32)
}

#[derive(Debug, Clone)]
pub struct BitReader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> BitReader<'a> {
    pub fn new(data: &'a [u8]) -> Self {
        Self { data, pos: 0 }
    }

    /// Bit cursor measured from the start of the input.
    pub fn position(&self) -> usize {
        self.pos
    }

    pub fn remaining(&self) -> usize {
        self.data.len() * 8 - self.pos
    }

    pub fn read_bits(&mut self, nbits: u32) -> Result<u32, BitError> {
        if nbits > 32 {
            return Err(BitError::InvalidWidth(nbits));
        }
        if (nbits as usize) > self.remaining() {
            return Err(BitError::EndOfStream {
                position: self.pos,
                wanted: nbits,
            });
        }
        let mut value: u64 = 0;
        for _ in 0..nbits {
            value = (value << 1) | self.next_bit() as u64;
        }
        Ok(value as u32)
    }

    pub fn read_bit(&mut self) -> Result<bool, BitError> {
        if self.remaining() == 0 {
            return Err(BitError::EndOfStream {
                position: self.pos,
                wanted: 1,
            });
        }
        Ok(self.next_bit() == 1)
    }

    #[inline]
    fn next_bit(&mut self) -> u8 {
        let bit = (self.data[self.pos / 8] >> (7 - self.pos % 8)) & 1;
        self.pos += 1;
        bit
    }

    pub fn read_ue(&mut self) -> Result<u32, BitError> {
        let start = self.pos;
        let mut zeros = 0u32;
        while !self.read_bit()? {
            zeros += 1;
            if zeros >= 32 {
                return Err(BitError::MalformedPrefix(start));
            }
        }
        let suffix = self.read_bits(zeros)? as u64;
        Ok(((1u64 << zeros) + suffix - 1) as u32)
    }

    pub fn read_se(&mut self) -> Result<i32, BitError> {
        let k = self.read_ue()? as i64;
        Ok(if k % 2 == 1 {
            ((k + 1) / 2) as i32
        } else {
            (-(k / 2)) as i32
        })
    }
}
