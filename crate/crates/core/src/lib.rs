//! Exact computational toolkit for minimal Q-graded subalgebras of
//! semisimple Lie algebras: root systems, Chevalley bases, subalgebra
//! enumeration and certification, derivations and almost inner
//! derivations, centroids, loop algebras and affinizations.

pub mod acceptance;
pub mod chevalley;
pub mod dercalc;
pub mod exact;
pub mod loopalg;
pub mod qgraded;
pub mod rootsys;
