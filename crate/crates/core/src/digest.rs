//! Stable 128-bit hashing used for state identity.

use std::hash::Hasher;

use siphasher::sip128::{Hasher128, SipHasher13};

const K0: u64 = 0x7069_6361_6c5f_6b30;
const K1: u64 = 0x7069_6361_6c5f_6b31;

pub type Digest = u128;

#[derive(Clone)]
pub struct H(SipHasher13);

impl H {
    pub fn new(tag: u8) -> H {
        let mut h = SipHasher13::new_with_keys(K0, K1);
        h.write_u8(tag);
        H(h)
    }

    pub fn u8(&mut self, v: u8) -> &mut Self {
        self.0.write_u8(v);
        self
    }

    pub fn u32(&mut self, v: u32) -> &mut Self {
        self.0.write_u32(v);
        self
    }

    pub fn u64(&mut self, v: u64) -> &mut Self {
        self.0.write_u64(v);
        self
    }

    pub fn u128(&mut self, v: u128) -> &mut Self {
        self.0.write_u128(v);
        self
    }

    pub fn finish(&self) -> Digest {
        self.0.finish128().as_u128()
    }
}

pub fn text_hash(s: &str) -> u64 {
    let mut h = SipHasher13::new_with_keys(K0, K1);
    h.write(s.as_bytes());
    h.finish()
}

pub fn hex(d: Digest) -> String {
    format!("{d:032x}")
}
