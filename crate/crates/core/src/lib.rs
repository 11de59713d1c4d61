#![no_std]
// Float methods come from `num_traits::Float` in no_std builds; when a
// dependent enables std those imports become redundant.
#![allow(unused_imports)]

extern crate alloc;

pub mod cases;
pub mod chow;
pub mod cyclo;
pub mod dual;
pub mod fit;
pub mod heisenberg;
pub mod linalg;
pub mod poly;
pub mod rng;
pub mod theta;
