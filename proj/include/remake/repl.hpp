#pragma once

#include <istream>
#include <ostream>

#include "remake/interface.hpp"
#include "remake/kb.hpp"

namespace remake {

// Line-oriented wizard loop: "[..." lines are actions, "/user <text>" adds a
// user turn, "/state" prints the interface, "/quit" (or end of input) exits.
// Every successful transition prints the new interface; errors are printed
// and the loop continues.
InterfaceState run_repl(std::istream& in, std::ostream& out, const KnowledgeBase& kb,
                        const InterfaceOptions& options = {}, bool prompt = true);

}  // namespace remake
