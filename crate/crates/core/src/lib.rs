//! Core algorithms for byzantine consensus over noisy broadcast channels.
//!
//! A broadcast channel carries one input to two receivers. A consensus code
//! must deliver the honest sender's message to both receivers and keep the
//! two decoder outputs equal no matter what a malicious sender transmits.
//! This crate provides:
//!
//! * finite broadcast channel models and samplers ([`channel`]),
//! * the common channel, effective input alphabet, decomposition kernel and
//!   attack-margin analysis ([`common`]),
//! * numerical capacity solvers: point-to-point, common-message and
//!   consensus capacity ([`capacity`]),
//! * codebook constructions and the joint-type machinery ([`coding`],
//!   [`types`]),
//! * the consensus decoders ([`decoding`]) and sender attacks
//!   ([`adversary`]),
//! * Monte Carlo and exact error estimation plus brute-force impossibility
//!   oracles ([`sim`]).
//!
//! The crate is `no_std` + `alloc`; IO, file formats and the CLI live in the
//! companion `consensus-lab` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod adversary;
pub mod capacity;
pub mod channel;
pub mod coding;
pub mod common;
pub mod decoding;
pub mod gf2;
pub mod math;
pub mod pmf;
pub mod rng;
pub mod sim;
pub mod solver;
pub mod types;
pub mod zoo;

pub use channel::{Alphabet, BroadcastChannel, ChannelError, PointToPointChannel};
pub use common::{CharacteristicGraph, CommonStructure, EtaMargin, MixingKernel};
pub use decoding::{DecodeOutcome, DecoderConfig};
pub use sim::ErrorReport;
