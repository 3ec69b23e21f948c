pub mod compare;
pub mod ensemble;
pub mod riccati;
pub mod solve;
pub mod tools;
