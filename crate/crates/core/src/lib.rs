pub mod arrangement;
pub mod error;
pub mod gen;
pub mod io;
pub mod geom;
pub mod portals;
pub mod spanner;
pub mod triangle_spanner;
pub mod triangulation;
pub mod verify;
pub mod wedge;

pub use error::{Error, Result};

#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/delaunay.md")]
    mod delaunay {}
    #[doc = include_str!("../../../book/src/portals.md")]
    mod portals {}
    #[doc = include_str!("../../../book/src/wedges.md")]
    mod wedges {}
    #[doc = include_str!("../../../book/src/triangle-spanner.md")]
    mod triangle_spanner {}
    #[doc = include_str!("../../../book/src/assembly.md")]
    mod assembly {}
    #[doc = include_str!("../../../book/src/verification.md")]
    mod verification {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
