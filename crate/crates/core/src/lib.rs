//! Point-level algebra of overlapping-disc operads.
//!
//! The crate implements, over exact rationals or floats:
//!
//! * configurations of weighted discs with operadic composition and
//!   decomposition, and the membership classifiers for the standard
//!   subspaces ([`disc`]);
//! * labelled trees as laminar families, with grafting, enumeration and
//!   decomposition ([`trees`]);
//! * compactified configuration spaces as coherent tables of finite-subset
//!   configurations ([`fm`]);
//! * one-point compactifications and quotient spheres of disc spaces, with
//!   the coendomorphism pairing and the direct-sum splitting ([`spheres`]);
//! * bar-construction points over trees and the duality pairings between
//!   them and configuration tables ([`bar`]);
//! * the collision retraction flow that pushes barycentric configurations
//!   into the unit disc ([`flow`]);
//! * deterministic samplers and the verification-suite runner behind the
//!   command-line harness ([`sample`], [`suite`]).

pub mod bar;
pub mod disc;
pub mod error;
pub mod flow;
pub mod fm;
pub mod geometry;
pub mod sample;
pub mod spheres;
pub mod suite;
pub mod trees;

pub use error::{Error, Result};
