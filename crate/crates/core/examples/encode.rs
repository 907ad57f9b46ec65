//! Encode a term with each applicable encoding.
//!
//! cargo run -p pical-core --example encode -- 'x!<z>.0 | x?(y).0'

use pical_core::{encode, parse_any, pretty, well_formed, EncodingId};

fn main() {
    let src = std::env::args().nth(1).unwrap_or_else(|| "x!<z>.0 | x?(y).ok".to_string());
    let term = match parse_any(&src) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("{e}");
            std::process::exit(2);
        }
    };
    for enc in EncodingId::ALL {
        if well_formed(&term, enc.source()).is_err() {
            println!("{enc}: source is not in {:?}", enc.source());
            continue;
        }
        match encode(&term, enc) {
            Ok(t) => println!("{enc}:\n  {}\n", pretty(&t)),
            Err(e) => println!("{enc}: {e}\n"),
        }
    }
}
