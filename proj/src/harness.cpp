namespace nsf::detail { int placeholder_harness = 0; }
