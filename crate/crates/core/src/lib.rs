//! Complexity testing for graded modules over graded Artinian local algebras.
//!
//! The crate computes minimal free resolutions, Betti numbers, complexity
//! estimates, Ext/Tor tables and pushout extensions, and provides Eisenbud
//! operators and coordinate-cut test modules over monomial complete
//! intersections. A line-oriented scenario language ([`cxcli`]) drives it all.

pub mod exactla;
pub mod gralg;
pub mod gmod;
pub mod resol;
pub mod yoneda;
pub mod cioper;
pub mod cxcli;
