#include "remake/repl.hpp"

#include <string>

namespace remake {

InterfaceState run_repl(std::istream& in, std::ostream& out, const KnowledgeBase& kb,
                        const InterfaceOptions& options, bool prompt) {
    InterfaceState state;
    std::string line;
    for (;;) {
        if (prompt) out << "> " << std::flush;
        if (!std::getline(in, line)) break;
        std::string cmd = text::trim(line);
        if (cmd.empty()) continue;
        if (cmd == "/quit") break;
        if (cmd == "/state") {
            out << render_state(state, options);
            continue;
        }
        try {
            if (cmd.starts_with("/user")) {
                state = user_turn(state, text::trim(std::string_view(cmd).substr(5)));
            } else if (cmd.front() == '[') {
                state = apply_action(state, parse_command(cmd), kb);
            } else if (cmd.front() == '/') {
                out << "error: unknown command " << cmd << " (use /user, /state, /quit or an action)\n";
                continue;
            } else {
                state = apply_action(state, Action::chat(cmd), kb);
            }
            out << render_state(state, options);
        } catch (const Error& e) {
            out << "error: " << e.what() << "\n";
        }
    }
    return state;
}

}  // namespace remake
