namespace nsf::detail { int placeholder_relenergy = 0; }
