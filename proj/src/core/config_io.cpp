#include "sep/core/config_io.hpp"

#include <sstream>
#include <stdexcept>

namespace sep {

char symbol_char(ConfigKind kind, Symbol s) {
  if (!symbol_allowed(kind, s)) throw std::invalid_argument("symbol outside alphabet");
  if (kind == ConfigKind::occupancy) return s ? '1' : '0';
  switch (s) {
    case sym::minus: return '-';
    case sym::empty: return '0';
    case sym::plus: return '+';
    default: return '2';
  }
}

Symbol parse_symbol(ConfigKind kind, char c) {
  Symbol s = 0;
  if (kind == ConfigKind::occupancy) {
    if (c == '0') s = 0;
    else if (c == '1') s = 1;
    else throw std::invalid_argument(std::string("bad occupancy symbol '") + c + "'");
    return s;
  }
  switch (c) {
    case '-': s = sym::minus; break;
    case '0': s = sym::empty; break;
    case '+': s = sym::plus; break;
    case '2': s = sym::both; break;
    default: throw std::invalid_argument(std::string("bad symbol '") + c + "'");
  }
  if (!symbol_allowed(kind, s)) throw std::invalid_argument(std::string("symbol '") + c + "' not allowed for kind");
  return s;
}

std::string to_text(const AnyConfig& config) {
  return std::visit(
      [](const auto& c) {
        const auto& lat = c.lattice();
        std::ostringstream os;
        os << lat.dimension() << ' ' << lat.side() << ' ' << kind_name(c.kind) << '\n';
        const auto L = static_cast<std::size_t>(lat.side());
        for (std::size_t i = 0; i < c.size(); ++i) {
          os << symbol_char(c.kind, c[static_cast<Site>(i)]);
          if ((i + 1) % L == 0) os << '\n';
        }
        return os.str();
      },
      config);
}

namespace {
template <class C>
C read_symbols(const TorusLattice& lat, std::istream& in) {
  std::vector<Symbol> v;
  v.reserve(lat.num_sites());
  char ch = 0;
  while (in >> ch) {
    if (v.size() == lat.num_sites()) throw std::invalid_argument("too many symbols in config text");
    v.push_back(parse_symbol(C::kind, ch));
  }
  if (v.size() != lat.num_sites()) throw std::invalid_argument("too few symbols in config text");
  return C(lat, std::move(v));
}
}  // namespace

AnyConfig from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  int d = 0, L = 0;
  std::string kind;
  if (!(in >> d >> L >> kind)) throw std::invalid_argument("config text header must be 'd L kind'");
  TorusLattice lat(d, L);
  if (kind == "occupancy") return read_symbols<OccupancyConfig>(lat, in);
  if (kind == "signed") return read_symbols<SignedConfig>(lat, in);
  if (kind == "two_species") return read_symbols<TwoSpeciesConfig>(lat, in);
  throw std::invalid_argument("unknown config kind '" + kind + "'");
}

}  // namespace sep
