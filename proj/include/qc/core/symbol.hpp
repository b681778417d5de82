#pragma once

#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qc {

using Var = std::int32_t;

// Process-wide interned variable names. Ids are assigned on first use.
class SymbolTable {
public:
    static SymbolTable& instance() {
        static SymbolTable t;
        return t;
    }

    Var intern(std::string_view name) {
        std::lock_guard<std::mutex> lk(mu_);
        auto it = ids_.find(std::string(name));
        if (it != ids_.end()) return it->second;
        Var id = static_cast<Var>(names_.size());
        names_.emplace_back(name);
        ids_.emplace(std::string(name), id);
        return id;
    }

    std::string name(Var v) const {
        std::lock_guard<std::mutex> lk(mu_);
        if (v < 0 || static_cast<std::size_t>(v) >= names_.size())
            throw std::out_of_range("unknown variable id");
        return names_[static_cast<std::size_t>(v)];
    }

private:
    SymbolTable() = default;
    mutable std::mutex mu_;
    std::vector<std::string> names_;
    std::unordered_map<std::string, Var> ids_;
};

inline Var var(std::string_view name) { return SymbolTable::instance().intern(name); }
inline std::string var_name(Var v) { return SymbolTable::instance().name(v); }

}  // namespace qc
