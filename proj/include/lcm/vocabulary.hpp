#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lcm {

using SymbolIndex = std::uint32_t;

/// Bijection between non-empty unique strings and dense indices, assigned in
/// insertion order.
class SymbolTable {
public:
    SymbolTable() = default;

    /// Index of `symbol`, inserting it at the end if new. Throws
    /// ValidationError on empty symbols or symbols containing tabs/newlines.
    SymbolIndex intern(std::string_view symbol);

    /// Appends a symbol that must not already exist.
    SymbolIndex add_new(std::string_view symbol);

    std::optional<SymbolIndex> find(std::string_view symbol) const;
    const std::string& at(SymbolIndex index) const;
    std::size_t size() const noexcept { return symbols_.size(); }
    bool empty() const noexcept { return symbols_.empty(); }
    const std::vector<std::string>& symbols() const noexcept { return symbols_; }

    friend bool operator==(const SymbolTable& a, const SymbolTable& b) { return a.symbols_ == b.symbols_; }

private:
    struct Hash {
        using is_transparent = void;
        std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
    };
    std::vector<std::string> symbols_;
    std::unordered_map<std::string, SymbolIndex, Hash, std::equal_to<>> index_;
};

/// Verb-functor and noun symbol tables, the V and N sets of the model.
struct Vocabulary {
    SymbolTable verbs;
    SymbolTable nouns;

    friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

enum class Frame { as, aso };
enum class Slot { s, o };

/// A verb lemma combined with a subcategorization frame slot, rendered as
/// `lemma.frame:slot` (e.g. `increase.aso:o`). The intransitive frame only
/// has a subject slot.
struct VerbFunctor {
    std::string lemma;
    Frame frame = Frame::as;
    Slot slot = Slot::s;

    /// Throws ValidationError on anything that does not render back to itself.
    static VerbFunctor parse(std::string_view text);
    std::string render() const;

    friend bool operator==(const VerbFunctor&, const VerbFunctor&) = default;
};

std::string_view frame_name(Frame frame);
std::string_view slot_name(Slot slot);

}  // namespace lcm
