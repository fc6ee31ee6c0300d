#pragma once

#include <string>
#include <vector>

#include "cnix/model.hpp"

namespace cnix::fixtures {

inline RawRecord corporate(std::string fid, std::string cid, std::string name, std::string country = "US") {
  RawRecord r;
  r.fid = std::move(fid);
  r.cid = std::move(cid);
  r.customer_type = CustomerType::kCorporate;
  r.company_name = std::move(name);
  r.country = std::move(country);
  return r;
}

inline RawRecord individual(std::string fid, std::string cid, std::string first, std::string last,
                            std::string street, std::string country = "IE") {
  RawRecord r;
  r.fid = std::move(fid);
  r.cid = std::move(cid);
  r.customer_type = CustomerType::kIndividual;
  r.first_name = std::move(first);
  r.last_name = std::move(last);
  r.street = std::move(street);
  r.country = std::move(country);
  return r;
}

// The eight names of the company-name tree example. Where the example gives
// no key, one is made up.
inline std::vector<RawRecord> company_tree_records() {
  return {
      corporate("Merlu", "2001", "FIRST COMMERCIAL BANK LTD"),
      corporate("Skada", "77", "FIRST BANK LTD OBB ACCOUNT"),
      corporate("Merlu", "1024", "FIRST AMERICA BANK LTD TRUST ACCOUNT TA 101010"),
      corporate("Abba", "392", "FIRST AMERICA BANK LTD TRUST ACCOUNT TA 101010"),
      corporate("Merlu", "1025", "FIRST AMERICA BANK LTD TRUST ACCOUNT TA 505055"),
      corporate("Skada", "B123", "ABC CAPITAL GROUP"),
      corporate("Abba", "566", "ABC CAPITAL NEW YORK BRANCH"),
      corporate("Abba", "801", "BANK OF UBUBA"),
      corporate("Skada", "C9", "INTERNATIONAL DDD INVEST CORP"),
  };
}

// Two customer names and three addresses of the inverted-list example.
inline std::vector<RawRecord> inverted_list_records() {
  return {
      individual("Abba", "1234", "John", "Smith", "123 Sunset"),
      individual("Merlu", "112", "Murphy", "John", "Avenue"),
      individual("Skada", "347", "", "", "123"),
  };
}

}  // namespace cnix::fixtures
