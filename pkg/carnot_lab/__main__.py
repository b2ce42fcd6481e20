from carnot_lab.cli import main

main()
