#include "lcm/vocabulary.hpp"

#include "lcm/errors.hpp"

#include <limits>

namespace lcm {
namespace {

void check_symbol(std::string_view symbol) {
    if (symbol.empty()) throw ValidationError("empty symbol");
    if (symbol.find_first_of("\t\n\r") != std::string_view::npos) {
        throw ValidationError("symbol contains a tab or line break: " + std::string(symbol));
    }
}

}  // namespace

SymbolIndex SymbolTable::intern(std::string_view symbol) {
    if (auto found = find(symbol)) return *found;
    return add_new(symbol);
}

SymbolIndex SymbolTable::add_new(std::string_view symbol) {
    check_symbol(symbol);
    if (symbols_.size() >= std::numeric_limits<SymbolIndex>::max()) throw ValidationError("symbol table full");
    auto index = static_cast<SymbolIndex>(symbols_.size());
    auto [it, inserted] = index_.emplace(std::string(symbol), index);
    if (!inserted) throw ValidationError("duplicate symbol: " + std::string(symbol));
    symbols_.push_back(it->first);
    return index;
}

std::optional<SymbolIndex> SymbolTable::find(std::string_view symbol) const {
    auto it = index_.find(symbol);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

const std::string& SymbolTable::at(SymbolIndex index) const {
    if (index >= symbols_.size()) {
        throw IndexError("symbol index " + std::to_string(index) + " out of range (size " +
                         std::to_string(symbols_.size()) + ")");
    }
    return symbols_[index];
}

std::string_view frame_name(Frame frame) { return frame == Frame::as ? "as" : "aso"; }
std::string_view slot_name(Slot slot) { return slot == Slot::s ? "s" : "o"; }

VerbFunctor VerbFunctor::parse(std::string_view text) {
    auto fail = [&](const char* why) {
        return ValidationError("invalid verb functor '" + std::string(text) + "': " + why);
    };
    auto colon = text.rfind(':');
    if (colon == std::string_view::npos) throw fail("missing ':slot'");
    auto dot = text.rfind('.', colon);
    if (dot == std::string_view::npos) throw fail("missing '.frame'");

    VerbFunctor out;
    out.lemma = std::string(text.substr(0, dot));
    if (out.lemma.empty()) throw fail("empty lemma");
    if (out.lemma.find_first_of("\t\n\r") != std::string::npos) throw fail("lemma contains whitespace control");

    auto frame = text.substr(dot + 1, colon - dot - 1);
    if (frame == "as") {
        out.frame = Frame::as;
    } else if (frame == "aso") {
        out.frame = Frame::aso;
    } else {
        throw fail("unknown frame");
    }

    auto slot = text.substr(colon + 1);
    if (slot == "s") {
        out.slot = Slot::s;
    } else if (slot == "o") {
        out.slot = Slot::o;
    } else {
        throw fail("unknown slot");
    }
    if (out.frame == Frame::as && out.slot != Slot::s) throw fail("intransitive frame has no object slot");
    return out;
}

std::string VerbFunctor::render() const {
    std::string out = lemma;
    out += '.';
    out += frame_name(frame);
    out += ':';
    out += slot_name(slot);
    return out;
}

}  // namespace lcm
