//! Complex numbers serialize as `[re, im]` pairs.

use num_complex::Complex64 as C64;
use serde::ser::{SerializeSeq, Serializer};
use serde::Serialize;

pub fn serialize<S: Serializer>(z: &C64, ser: S) -> Result<S::Ok, S::Error> {
    [z.re, z.im].serialize(ser)
}

pub fn serialize_vec<S: Serializer>(zs: &[C64], ser: S) -> Result<S::Ok, S::Error> {
    let mut seq = ser.serialize_seq(Some(zs.len()))?;
    for z in zs {
        seq.serialize_element(&[z.re, z.im])?;
    }
    seq.end()
}
