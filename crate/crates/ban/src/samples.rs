//! Worked example networks from the synchronism sensitivity analysis, used
//! throughout the documentation and the test suites.

use crate::expr::parse_network;
use crate::network::Network;

/// Two automata, `f_0 = x_0 ∧ ¬x_1`, `f_1 = ¬x_0 ∧ x_1`. One Hamiltonian
/// critical 2-cycle, a unique normal transition `11 ⇒ 00` with F-impact.
pub fn free_net() -> Network {
    parse_network("0: x0 & !x1\n1: !x0 & x1\n").unwrap()
}

/// The four-automaton widget whose normal transition `1100 ⇒ 0000` destroys
/// the unstable attractor `{x : x_0 ∨ x_1 = 1}`.
pub fn widget_net() -> Network {
    parse_network(
        "n = 4\n\
         0: x2 | (x0 & !x1)\n\
         1: x3 | (!x0 & x1)\n\
         2: !x0 & x1\n\
         3: x0 & !x1\n",
    )
    .unwrap()
}

/// Five-automaton extension of the widget; `11000 ⇒ 00000` has G-impact.
pub fn grows_net() -> Network {
    parse_network(
        "n = 5\n\
         0: (x2 | (x0 & !x1)) | (x4 & !x1 & !x3)\n\
         1: x3 | (!x0 & x1)\n\
         2: !x0 & x1\n\
         3: x0 & !x1\n\
         4: !(x0 | x1 | x2 | x3) & !x4\n",
    )
    .unwrap()
}

/// Size-2 network with both functions XOR; non-monotone and D-sensitive.
pub fn xor2_net() -> Network {
    parse_network("0: x0 ^ x1\n1: x0 ^ x1\n").unwrap()
}

/// The named size-3 monotone very-sensitive instance.
pub fn fig_new_net() -> Network {
    parse_network(
        "0: x2 | (x0 & !x1)\n\
         1: x2 | (!x0 & x1)\n\
         2: !x2 & (x0 | x1)\n",
    )
    .unwrap()
}
