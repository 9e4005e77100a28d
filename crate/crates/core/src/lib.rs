pub mod cli;
pub mod flatten;
pub mod ground;
pub mod lang;
pub mod limits;
pub mod model;
pub mod sat;
