pub mod cones;
pub mod finite_monoid;
pub mod io;
pub mod lattice;
pub mod roots_of_unity;
pub mod scong_toric;
pub mod toric_scheme;
